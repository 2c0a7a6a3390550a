#include "bse/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bse/errors.hpp"

namespace bse {

SparseSymMatrix SparseSymMatrix::from_triplets(
    int dimension, const std::vector<Eigen::Triplet<double>>& triplets) {
  SparseSymMatrix m;
  m.storage_.resize(dimension, dimension);
  m.storage_.setFromTriplets(triplets.begin(), triplets.end());
  m.storage_.makeCompressed();
  return m;
}

SparseSymMatrix SparseSymMatrix::plus(const SparseSymMatrix& other) const {
  if (dimension() != other.dimension())
    throw Error(ErrorKind::InvalidArgument, "matrix sum: dimension mismatch");
  SparseSymMatrix out;
  out.storage_ = storage_ + other.storage_;
  out.storage_.makeCompressed();
  return out;
}

SparseSymMatrix SparseSymMatrix::restricted(const std::vector<int>& keep) const {
  std::vector<int> position(static_cast<std::size_t>(dimension()), -1);
  for (int i = 0; i < static_cast<int>(keep.size()); ++i)
    position[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])] = i;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(storage_.nonZeros()));
  for (int row = 0; row < storage_.outerSize(); ++row) {
    const int new_row = position[static_cast<std::size_t>(row)];
    if (new_row < 0) continue;
    for (Storage::InnerIterator it(storage_, row); it; ++it) {
      const int new_col = position[static_cast<std::size_t>(it.col())];
      if (new_col < 0) continue;
      triplets.emplace_back(new_row, new_col, it.value());
    }
  }
  return from_triplets(static_cast<int>(keep.size()), triplets);
}

double SparseSymMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (int row = 0; row < storage_.outerSize(); ++row)
    for (Storage::InnerIterator it(storage_, row); it; ++it)
      worst = std::max(worst, std::abs(it.value() - storage_.coeff(it.col(), it.row())));
  return worst;
}

void SparseSymMatrix::dump_coordinate(std::ostream& out) const {
  std::int64_t upper = 0;
  for (int row = 0; row < storage_.outerSize(); ++row)
    for (Storage::InnerIterator it(storage_, row); it; ++it)
      if (it.col() >= it.row()) ++upper;
  out << "%%sym " << dimension() << " " << upper << "\n";
  for (int row = 0; row < storage_.outerSize(); ++row)
    for (Storage::InnerIterator it(storage_, row); it; ++it)
      if (it.col() >= it.row()) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%d %d %.17g\n", row,
                      static_cast<int>(it.col()), it.value());
        out << buffer;
      }
}

Eigen::VectorXd DiscreteSystem::restrict_to_free(const Eigen::VectorXd& vertex_values) const {
  if (vertex_values.size() != vertex_count)
    throw Error(ErrorKind::InvalidArgument, "vertex field has wrong length");
  Eigen::VectorXd out(dimension());
  for (int i = 0; i < dimension(); ++i)
    out[i] = vertex_values[free_dofs[static_cast<std::size_t>(i)]];
  return out;
}

Eigen::VectorXd DiscreteSystem::extend_to_vertices(const Eigen::VectorXd& free_values) const {
  if (free_values.size() != dimension())
    throw Error(ErrorKind::InvalidArgument, "free-dof vector has wrong length");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(vertex_count);
  for (int i = 0; i < dimension(); ++i)
    out[free_dofs[static_cast<std::size_t>(i)]] = free_values[i];
  return out;
}

namespace {

// Pushes one symmetric contribution: both (i,j) and (j,i) receive the same
// addend in adjacent triplet positions, so the accumulated values on the two
// triangles are bitwise equal.
void push_sym(std::vector<Eigen::Triplet<double>>& triplets, int i, int j, double value) {
  triplets.emplace_back(i, j, value);
  if (i != j) triplets.emplace_back(j, i, value);
}

double degenerate_area_floor(const Mesh& mesh) {
  double max_extent = 0.0;
  for (const auto& v : mesh.vertices)
    max_extent = std::max({max_extent, std::abs(v[0]), std::abs(v[1])});
  return 1e-14 * max_extent * max_extent;
}

} // namespace

SparseSymMatrix assemble_bulk_stiffness(const Mesh& mesh) {
  const double floor = degenerate_area_floor(mesh);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangles.size() * 9);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const auto& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const auto& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const auto& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];

    const double area =
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]));
    if (area <= floor)
      throw Error(ErrorKind::Numeric, "assembly: degenerate triangle " + std::to_string(t));

    // Constant P1 gradients: grad phi_i = (b_i, c_i) / (2 area).
    const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
    const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};

    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        push_sym(triplets, tri[i], tri[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
  }
  return SparseSymMatrix::from_triplets(mesh.vertex_count(), triplets);
}

SparseSymMatrix assemble_bulk_mass(const Mesh& mesh) {
  const double floor = degenerate_area_floor(mesh);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangles.size() * 9);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const auto& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const auto& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const auto& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];

    const double area =
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]));
    if (area <= floor)
      throw Error(ErrorKind::Numeric, "assembly: degenerate triangle " + std::to_string(t));

    // Consistent P1 mass block (area/12) * [[2,1,1],[1,2,1],[1,1,2]].
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        push_sym(triplets, tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
  }
  return SparseSymMatrix::from_triplets(mesh.vertex_count(), triplets);
}

namespace {

double gamma1_edge_length(const Mesh& mesh, const BoundaryEdge& e) {
  const auto& a = mesh.vertices[static_cast<std::size_t>(e.a)];
  const auto& b = mesh.vertices[static_cast<std::size_t>(e.b)];
  const double length = std::hypot(b[0] - a[0], b[1] - a[1]);
  if (!(length > 0.0))
    throw Error(ErrorKind::Numeric, "assembly: zero-length Gamma1 edge (" +
                                        std::to_string(e.a) + "," + std::to_string(e.b) + ")");
  return length;
}

} // namespace

SparseSymMatrix assemble_surface_stiffness(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& e : mesh.boundary_edges) {
    if (e.label != BoundaryLabel::Gamma1) continue;
    const double length = gamma1_edge_length(mesh, e);
    // Arc-length derivative product on the chord: (1/L) [[1,-1],[-1,1]].
    push_sym(triplets, e.a, e.a, 1.0 / length);
    push_sym(triplets, e.b, e.b, 1.0 / length);
    push_sym(triplets, e.a, e.b, -1.0 / length);
  }
  return SparseSymMatrix::from_triplets(mesh.vertex_count(), triplets);
}

SparseSymMatrix assemble_surface_mass(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& e : mesh.boundary_edges) {
    if (e.label != BoundaryLabel::Gamma1) continue;
    const double length = gamma1_edge_length(mesh, e);
    // Consistent 1D mass block (L/6) [[2,1],[1,2]].
    push_sym(triplets, e.a, e.a, length / 3.0);
    push_sym(triplets, e.b, e.b, length / 3.0);
    push_sym(triplets, e.a, e.b, length / 6.0);
  }
  return SparseSymMatrix::from_triplets(mesh.vertex_count(), triplets);
}

DiscreteSystem build_system(const Mesh& mesh) {
  validate_mesh(mesh);

  const SparseSymMatrix A_full =
      assemble_bulk_stiffness(mesh).plus(assemble_surface_stiffness(mesh));
  const SparseSymMatrix M_full = assemble_bulk_mass(mesh).plus(assemble_surface_mass(mesh));

  const auto pinned = mesh.boundary_vertex_mask(BoundaryLabel::Gamma0);
  DiscreteSystem system;
  system.vertex_count = mesh.vertex_count();
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!pinned[static_cast<std::size_t>(v)]) system.free_dofs.push_back(v);
  if (system.free_dofs.empty())
    throw Error(ErrorKind::Invariant, "build_system: no free degrees of freedom");

  system.A = A_full.restricted(system.free_dofs);
  system.M = M_full.restricted(system.free_dofs);
  system.mesh_ref = mesh_content_hash(mesh);
  return system;
}

} // namespace bse
