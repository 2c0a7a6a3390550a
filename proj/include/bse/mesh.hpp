#ifndef BSE_MESH_HPP
#define BSE_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace bse {

// Boundary component labels: Gamma0 is the pinned (Dirichlet) part of the
// boundary, Gamma1 the free part carrying the surface operator.
enum class BoundaryLabel { Gamma0, Gamma1 };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryLabel label = BoundaryLabel::Gamma0;

  bool operator==(const BoundaryEdge&) const = default;
};

// 2D triangular mesh with labeled boundary components. Immutable by
// convention: all operations return new meshes.
struct Mesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles; // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int boundary_count(BoundaryLabel label) const;

  // Flags, one per vertex, marking membership in the given boundary set.
  std::vector<char> boundary_vertex_mask(BoundaryLabel label) const;

  bool operator==(const Mesh&) const = default;
};

struct AnnulusParams {
  double r_inner = 1.0;
  double r_outer = 2.0;
  int n_radial = 16;
  int n_angular = 64;
};

// Structured annulus: n_radial+1 concentric polygonal rings of n_angular
// vertices, quads split into triangle pairs. Inner ring edges are Gamma1,
// outer ring edges Gamma0; ring vertices lie exactly on their circles.
Mesh generate_annulus(const AnnulusParams& params);

// Splits every triangle into 4 via edge midpoints. Boundary midpoints whose
// parent edge endpoints are equidistant from the origin (circular boundary
// rings, rotated or not) are projected radially back onto that circle.
Mesh refine_uniform(const Mesh& mesh);

// Rigid rotation of all vertex coordinates about the origin.
Mesh rotate(const Mesh& mesh, double angle);

// Checks all mesh invariants; throws Error{Invariant} naming the offender.
void validate_mesh(const Mesh& mesh);

double signed_area(const Mesh& mesh, int triangle_index);
double total_area(const Mesh& mesh);
double boundary_length(const Mesh& mesh, BoundaryLabel label);

// Number of distinct undirected edges (from triangle connectivity).
int edge_count(const Mesh& mesh);

// True when the triangle adjacency graph has one component (union-find).
bool is_connected(const Mesh& mesh);

// Text serialization ("bse-mesh 1" format). Coordinates round-trip exactly.
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in, const std::string& origin);

// FNV-1a hash of the serialized mesh; used to tie downstream artifacts to
// their source mesh.
std::string mesh_content_hash(const Mesh& mesh);

// Groups vertices by distance from the origin (relative tolerance on the
// radius). Rings are returned sorted by radius ascending. Meshes produced by
// generate_annulus/refine_uniform always decompose this way.
struct RingDecomposition {
  std::vector<double> radii;
  std::vector<std::vector<int>> rings; // vertex indices per ring
};
RingDecomposition ring_decomposition(const Mesh& mesh, double rel_tol = 1e-9);

} // namespace bse

#endif
