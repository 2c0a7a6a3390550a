#include "bse/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "bse/errors.hpp"

namespace bse {

namespace {

std::array<double, 2> vertex_or_throw(const Mesh& mesh, int v) {
  if (v < 0 || v >= mesh.vertex_count())
    throw Error(ErrorKind::Invariant, "vertex index " + std::to_string(v) + " out of range");
  return mesh.vertices[static_cast<std::size_t>(v)];
}

double tri_signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                       const std::array<double, 2>& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

std::pair<int, int> sorted_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Undirected edge -> number of incident triangles.
std::map<std::pair<int, int>, int> edge_incidence(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      ++count[sorted_edge(t[e], t[(e + 1) % 3])];
  return count;
}

} // namespace

int Mesh::boundary_count(BoundaryLabel label) const {
  int n = 0;
  for (const auto& e : boundary_edges)
    if (e.label == label) ++n;
  return n;
}

std::vector<char> Mesh::boundary_vertex_mask(BoundaryLabel label) const {
  std::vector<char> mask(vertices.size(), 0);
  for (const auto& e : boundary_edges) {
    if (e.label != label) continue;
    mask[static_cast<std::size_t>(e.a)] = 1;
    mask[static_cast<std::size_t>(e.b)] = 1;
  }
  return mask;
}

Mesh generate_annulus(const AnnulusParams& params) {
  if (!(params.r_inner > 0.0))
    throw Error(ErrorKind::InvalidArgument, "annulus: r_inner must be positive");
  if (!(params.r_outer > 0.0))
    throw Error(ErrorKind::InvalidArgument, "annulus: r_outer must be positive");
  if (!(params.r_inner < params.r_outer))
    throw Error(ErrorKind::InvalidArgument, "annulus: r_inner must be smaller than r_outer");
  if (params.n_radial < 2)
    throw Error(ErrorKind::InvalidArgument, "annulus: n_radial must be at least 2");
  if (params.n_angular < 8)
    throw Error(ErrorKind::InvalidArgument, "annulus: n_angular must be at least 8");

  const int nr = params.n_radial;
  const int na = params.n_angular;
  const double dr = (params.r_outer - params.r_inner) / nr;

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>((nr + 1) * na));
  for (int k = 0; k <= nr; ++k) {
    const double r = params.r_inner + k * dr;
    for (int j = 0; j < na; ++j) {
      const double theta = 2.0 * M_PI * j / na;
      mesh.vertices.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }

  auto idx = [na](int ring, int j) { return ring * na + (j % na); };

  mesh.triangles.reserve(static_cast<std::size_t>(2 * nr * na));
  for (int k = 0; k < nr; ++k) {
    for (int j = 0; j < na; ++j) {
      const int a = idx(k, j);      // inner, angle j
      const int b = idx(k, j + 1);  // inner, angle j+1
      const int c = idx(k + 1, j + 1);
      const int d = idx(k + 1, j);  // outer, angle j
      // quad (a, d, c, b) is counterclockwise
      mesh.triangles.push_back({a, d, c});
      mesh.triangles.push_back({a, c, b});
    }
  }

  for (int j = 0; j < na; ++j)
    mesh.boundary_edges.push_back({idx(0, j), idx(0, j + 1), BoundaryLabel::Gamma1});
  for (int j = 0; j < na; ++j)
    mesh.boundary_edges.push_back({idx(nr, j), idx(nr, j + 1), BoundaryLabel::Gamma0});

  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  validate_mesh(mesh);

  Mesh out;
  out.vertices = mesh.vertices;

  std::map<std::pair<int, int>, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    const auto key = sorted_edge(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto& pa = out.vertices[static_cast<std::size_t>(a)];
    const auto& pb = out.vertices[static_cast<std::size_t>(b)];
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    midpoint.emplace(key, id);
    return id;
  };

  out.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int ab = midpoint_of(t[0], t[1]);
    const int bc = midpoint_of(t[1], t[2]);
    const int ca = midpoint_of(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }

  out.boundary_edges.reserve(mesh.boundary_edges.size() * 2);
  for (const auto& e : mesh.boundary_edges) {
    const int m = midpoint_of(e.a, e.b);
    out.boundary_edges.push_back({e.a, m, e.label});
    out.boundary_edges.push_back({m, e.b, e.label});

    // Circular boundary ring: endpoints equidistant from the origin. Project
    // the midpoint radially back onto that circle so refined annulus meshes
    // keep their boundary vertices on the nominal radii.
    const auto& pa = out.vertices[static_cast<std::size_t>(e.a)];
    const auto& pb = out.vertices[static_cast<std::size_t>(e.b)];
    const double ra = std::hypot(pa[0], pa[1]);
    const double rb = std::hypot(pb[0], pb[1]);
    if (ra > 0.0 && std::abs(ra - rb) <= 1e-9 * std::max(ra, rb)) {
      auto& pm = out.vertices[static_cast<std::size_t>(m)];
      const double rm = std::hypot(pm[0], pm[1]);
      if (rm > 0.0) {
        const double target = 0.5 * (ra + rb);
        pm[0] *= target / rm;
        pm[1] *= target / rm;
      }
    }
  }

  return out;
}

Mesh rotate(const Mesh& mesh, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mesh out = mesh;
  for (auto& v : out.vertices) {
    const double x = v[0], y = v[1];
    v[0] = c * x - s * y;
    v[1] = s * x + c * y;
  }
  return out;
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.vertices.empty())
    throw Error(ErrorKind::Invariant, "mesh has no vertices");
  if (mesh.triangles.empty())
    throw Error(ErrorKind::Invariant, "mesh has no triangles");

  double max_extent = 0.0;
  for (const auto& v : mesh.vertices)
    max_extent = std::max({max_extent, std::abs(v[0]), std::abs(v[1])});
  const double area_floor = 1e-14 * max_extent * max_extent;

  for (int i = 0; i < mesh.triangle_count(); ++i) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(i)];
    const auto a = vertex_or_throw(mesh, t[0]);
    const auto b = vertex_or_throw(mesh, t[1]);
    const auto c = vertex_or_throw(mesh, t[2]);
    if (tri_signed_area(a, b, c) <= area_floor)
      throw Error(ErrorKind::Invariant,
                  "triangle " + std::to_string(i) + " has non-positive signed area");
  }

  const auto incidence = edge_incidence(mesh);

  std::map<std::pair<int, int>, BoundaryLabel> boundary;
  for (const auto& e : mesh.boundary_edges) {
    vertex_or_throw(mesh, e.a);
    vertex_or_throw(mesh, e.b);
    const auto key = sorted_edge(e.a, e.b);
    if (boundary.count(key))
      throw Error(ErrorKind::Invariant, "boundary edge (" + std::to_string(e.a) + "," +
                                            std::to_string(e.b) + ") listed twice");
    boundary.emplace(key, e.label);

    auto it = incidence.find(key);
    if (it == incidence.end())
      throw Error(ErrorKind::Invariant, "boundary edge (" + std::to_string(e.a) + "," +
                                            std::to_string(e.b) + ") is not a triangle edge");
    if (it->second != 1)
      throw Error(ErrorKind::Invariant,
                  "boundary edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                      ") belongs to " + std::to_string(it->second) + " triangles, expected 1");
  }

  for (const auto& [edge, count] : incidence) {
    if (boundary.count(edge)) continue;
    if (count != 2)
      throw Error(ErrorKind::Invariant,
                  "interior edge (" + std::to_string(edge.first) + "," +
                      std::to_string(edge.second) + ") belongs to " + std::to_string(count) +
                      " triangles, expected 2");
  }

  int n_g0 = mesh.boundary_count(BoundaryLabel::Gamma0);
  int n_g1 = mesh.boundary_count(BoundaryLabel::Gamma1);
  if (n_g0 == 0)
    throw Error(ErrorKind::Invariant, "Gamma0 edge set is empty");
  if (n_g1 == 0)
    throw Error(ErrorKind::Invariant, "Gamma1 edge set is empty");

  const auto mask0 = mesh.boundary_vertex_mask(BoundaryLabel::Gamma0);
  const auto mask1 = mesh.boundary_vertex_mask(BoundaryLabel::Gamma1);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mask0[static_cast<std::size_t>(v)] && mask1[static_cast<std::size_t>(v)])
      throw Error(ErrorKind::Invariant,
                  "vertex " + std::to_string(v) + " touches both Gamma0 and Gamma1");
}

double signed_area(const Mesh& mesh, int triangle_index) {
  const auto& t = mesh.triangles.at(static_cast<std::size_t>(triangle_index));
  return tri_signed_area(mesh.vertices[static_cast<std::size_t>(t[0])],
                         mesh.vertices[static_cast<std::size_t>(t[1])],
                         mesh.vertices[static_cast<std::size_t>(t[2])]);
}

double total_area(const Mesh& mesh) {
  double area = 0.0;
  for (int i = 0; i < mesh.triangle_count(); ++i) area += signed_area(mesh, i);
  return area;
}

double boundary_length(const Mesh& mesh, BoundaryLabel label) {
  double length = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    if (e.label != label) continue;
    const auto& a = mesh.vertices[static_cast<std::size_t>(e.a)];
    const auto& b = mesh.vertices[static_cast<std::size_t>(e.b)];
    length += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return length;
}

int edge_count(const Mesh& mesh) { return static_cast<int>(edge_incidence(mesh).size()); }

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

} // namespace

bool is_connected(const Mesh& mesh) {
  if (mesh.triangles.empty()) return false;
  UnionFind uf(mesh.triangle_count());
  std::map<std::pair<int, int>, int> first_triangle;
  for (int i = 0; i < mesh.triangle_count(); ++i) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(i)];
    for (int e = 0; e < 3; ++e) {
      const auto key = sorted_edge(t[e], t[(e + 1) % 3]);
      auto [it, inserted] = first_triangle.emplace(key, i);
      if (!inserted) uf.unite(i, it->second);
    }
  }
  const int root = uf.find(0);
  for (int i = 1; i < mesh.triangle_count(); ++i)
    if (uf.find(i) != root) return false;
  return true;
}

namespace {

std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

} // namespace

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "bse-mesh 1\n";
  out << "vertices " << mesh.vertex_count() << "\n";
  for (const auto& v : mesh.vertices)
    out << format_double(v[0]) << " " << format_double(v[1]) << "\n";
  out << "triangles " << mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    out << e.a << " " << e.b << " " << (e.label == BoundaryLabel::Gamma0 ? "g0" : "g1") << "\n";
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  validate_mesh(mesh);
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
  out.flush();
  if (!out)
    throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

namespace {

class LineReader {
public:
  LineReader(std::istream& in, const std::string& origin) : in_(in), origin_(origin) {}

  // Next non-empty line, or false at end of stream.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_number_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Format,
                origin_ + ":" + std::to_string(line_number_) + ": " + what);
  }

  int line_number() const { return line_number_; }

private:
  std::istream& in_;
  std::string origin_;
  int line_number_ = 0;
};

} // namespace

Mesh read_mesh(std::istream& in, const std::string& origin) {
  LineReader reader(in, origin);
  std::string line;

  if (!reader.next(line)) reader.fail("missing header");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    std::string extra;
    if (!(ss >> magic >> version) || magic != "bse-mesh" || version != 1 || (ss >> extra))
      reader.fail("expected header 'bse-mesh 1'");
  }

  auto read_count = [&](const char* keyword) {
    if (!reader.next(line)) reader.fail(std::string("missing '") + keyword + "' section");
    std::istringstream ss(line);
    std::string word;
    long long n = -1;
    std::string extra;
    if (!(ss >> word >> n) || word != keyword || n < 0 || (ss >> extra))
      reader.fail(std::string("expected '") + keyword + " N'");
    return static_cast<int>(n);
  };

  Mesh mesh;

  const int n_vertices = read_count("vertices");
  mesh.vertices.reserve(static_cast<std::size_t>(n_vertices));
  for (int i = 0; i < n_vertices; ++i) {
    if (!reader.next(line)) reader.fail("unexpected end of file in vertex list");
    std::istringstream ss(line);
    double x = 0, y = 0;
    std::string extra;
    if (!(ss >> x >> y) || (ss >> extra))
      reader.fail("vertex " + std::to_string(i) + ": expected 'x y'");
    mesh.vertices.push_back({x, y});
  }

  const int n_triangles = read_count("triangles");
  mesh.triangles.reserve(static_cast<std::size_t>(n_triangles));
  for (int i = 0; i < n_triangles; ++i) {
    if (!reader.next(line)) reader.fail("unexpected end of file in triangle list");
    std::istringstream ss(line);
    int a = 0, b = 0, c = 0;
    std::string extra;
    if (!(ss >> a >> b >> c) || (ss >> extra))
      reader.fail("triangle " + std::to_string(i) + ": expected 'i j k'");
    mesh.triangles.push_back({a, b, c});
  }

  const int n_boundary = read_count("boundary");
  mesh.boundary_edges.reserve(static_cast<std::size_t>(n_boundary));
  for (int i = 0; i < n_boundary; ++i) {
    if (!reader.next(line)) reader.fail("unexpected end of file in boundary list");
    std::istringstream ss(line);
    int a = 0, b = 0;
    std::string label, extra;
    if (!(ss >> a >> b >> label) || (ss >> extra))
      reader.fail("boundary edge " + std::to_string(i) + ": expected 'i j label'");
    BoundaryLabel l;
    if (label == "g0")
      l = BoundaryLabel::Gamma0;
    else if (label == "g1")
      l = BoundaryLabel::Gamma1;
    else
      reader.fail("boundary edge " + std::to_string(i) + ": label '" + label +
                  "' is neither g0 nor g1");
    mesh.boundary_edges.push_back({a, b, l});
  }

  if (reader.next(line)) reader.fail("unknown trailing section '" + line + "'");

  validate_mesh(mesh);
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open mesh file '" + path + "'");
  return read_mesh(in, path);
}

std::string mesh_content_hash(const Mesh& mesh) {
  std::ostringstream ss;
  write_mesh(mesh, ss);
  const std::string bytes = ss.str();
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "fnv1a:%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

RingDecomposition ring_decomposition(const Mesh& mesh, double rel_tol) {
  std::vector<std::pair<double, int>> radii(mesh.vertices.size());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const auto& p = mesh.vertices[static_cast<std::size_t>(v)];
    radii[static_cast<std::size_t>(v)] = {std::hypot(p[0], p[1]), v};
  }
  std::sort(radii.begin(), radii.end());

  RingDecomposition rings;
  const double scale = radii.empty() ? 1.0 : std::max(radii.back().first, 1e-300);
  for (const auto& [r, v] : radii) {
    if (rings.radii.empty() || r - rings.radii.back() > rel_tol * scale) {
      rings.radii.push_back(r);
      rings.rings.emplace_back();
    }
    rings.rings.back().push_back(v);
  }
  return rings;
}

} // namespace bse
