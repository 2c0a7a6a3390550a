#ifndef BSE_ASSEMBLY_HPP
#define BSE_ASSEMBLY_HPP

#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bse/mesh.hpp"

namespace bse {

// Symmetric sparse matrix with both triangles stored. Assembly mirrors each
// off-diagonal contribution so that value symmetry is exact, entry by entry.
class SparseSymMatrix {
public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseSymMatrix() = default;

  static SparseSymMatrix from_triplets(int dimension,
                                       const std::vector<Eigen::Triplet<double>>& triplets);

  int dimension() const { return static_cast<int>(storage_.rows()); }
  std::int64_t stored_entries() const { return storage_.nonZeros(); }
  const Storage& storage() const { return storage_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return storage_ * x; }
  double coeff(int i, int j) const { return storage_.coeff(i, j); }

  SparseSymMatrix plus(const SparseSymMatrix& other) const;

  // Keeps rows/columns listed in `keep` (in order), dropping the rest.
  SparseSymMatrix restricted(const std::vector<int>& keep) const;

  // Largest |a_ij - a_ji| over the stored pattern; 0 for assembled matrices.
  double max_asymmetry() const;

  // Coordinate text dump: header "%%sym n nnz", one "i j value" line per
  // stored upper-triangle entry.
  void dump_coordinate(std::ostream& out) const;

private:
  Storage storage_;
};

// Discrete pencil (A, M) on free degrees of freedom. A carries the bulk and
// surface gradient products, M the bulk and surface L2 products; Gamma0
// vertices are eliminated by row/column deletion.
struct DiscreteSystem {
  SparseSymMatrix A;
  SparseSymMatrix M;
  std::vector<int> free_dofs; // free index -> vertex index
  std::string mesh_ref;
  int vertex_count = 0;

  int dimension() const { return static_cast<int>(free_dofs.size()); }

  // Scatter/gather between vertex fields and free-dof vectors. Gamma0
  // vertices are zero in the vertex field.
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& vertex_values) const;
  Eigen::VectorXd extend_to_vertices(const Eigen::VectorXd& free_values) const;
};

SparseSymMatrix assemble_bulk_stiffness(const Mesh& mesh);
SparseSymMatrix assemble_bulk_mass(const Mesh& mesh);
SparseSymMatrix assemble_surface_stiffness(const Mesh& mesh);
SparseSymMatrix assemble_surface_mass(const Mesh& mesh);

DiscreteSystem build_system(const Mesh& mesh);

} // namespace bse

#endif
