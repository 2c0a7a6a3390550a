#include "bse/serialize.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bse/errors.hpp"
#include "bse/version.hpp"

namespace bse {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "fnv1a:%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string file_content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open '" + path + "' for hashing");
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

namespace {

json provenance_json(const Provenance* provenance) {
  json p;
  if (!provenance) return p;
  p["tool_version"] = provenance->tool_version;
  if (!provenance->config_json.empty()) p["config"] = json::parse(provenance->config_json);
  if (!provenance->timestamp.empty()) p["timestamp"] = provenance->timestamp;
  json hashes = json::object();
  for (const auto& [path, hash] : provenance->input_hashes) hashes[path] = hash;
  p["input_hashes"] = hashes;
  return p;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  out.flush();
  if (!out)
    throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

json load_json_file(const std::string& path, const char* expected_format) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Format, path + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != expected_format)
    throw Error(ErrorKind::Format,
                path + ": expected a '" + std::string(expected_format) + "' document");
  return j;
}

} // namespace

void save_spectrum(const Spectrum& spectrum, const DiscreteSystem& system, bool with_vectors,
                   const Provenance* provenance, const std::string& path) {
  json j;
  j["format"] = "bse-spectrum";
  j["version"] = 1;
  j["k_requested"] = spectrum.k_requested;
  j["mesh_ref"] = system.mesh_ref;

  json lambdas = json::array();
  json residuals = json::array();
  for (const auto& pair : spectrum.pairs) {
    lambdas.push_back(pair.lambda);
    residuals.push_back(pair.residual);
  }
  j["lambda"] = lambdas;
  j["residual"] = residuals;

  j["diagnostics"] = {{"operator_applications", spectrum.diagnostics.operator_applications},
                      {"restarts", spectrum.diagnostics.restarts},
                      {"factor_nonzeros", spectrum.diagnostics.factor_nonzeros},
                      {"dense_path", spectrum.diagnostics.dense_path}};

  if (with_vectors) {
    // Vertex-indexed fields with Gamma0 zeros materialized.
    json vectors = json::array();
    for (const auto& pair : spectrum.pairs) {
      const Eigen::VectorXd field = system.extend_to_vertices(pair.vector);
      json row = json::array();
      for (int i = 0; i < field.size(); ++i) row.push_back(field[i]);
      vectors.push_back(std::move(row));
    }
    j["vectors"] = vectors;
  }

  if (provenance) j["provenance"] = provenance_json(provenance);
  write_json_file(j, path);
}

Spectrum load_spectrum(const std::string& path, const DiscreteSystem& system) {
  const json j = load_json_file(path, "bse-spectrum");

  if (j.value("mesh_ref", "") != system.mesh_ref)
    throw Error(ErrorKind::InvalidArgument,
                path + ": spectrum was computed on a different mesh (mesh_ref mismatch)");
  if (!j.contains("vectors"))
    throw Error(ErrorKind::Format, path + ": spectrum file carries no eigenvectors");

  Spectrum spectrum;
  spectrum.k_requested = j.value("k_requested", 0);
  const auto& lambdas = j.at("lambda");
  const auto& residuals = j.at("residual");
  const auto& vectors = j.at("vectors");
  if (lambdas.size() != vectors.size() || lambdas.size() != residuals.size())
    throw Error(ErrorKind::Format, path + ": inconsistent array lengths");

  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    EigenPair pair;
    pair.lambda = lambdas[i].get<double>();
    pair.residual = residuals[i].get<double>();
    const auto& row = vectors[i];
    if (static_cast<int>(row.size()) != system.vertex_count)
      throw Error(ErrorKind::Format, path + ": eigenvector length does not match the mesh");
    Eigen::VectorXd field(system.vertex_count);
    for (int v = 0; v < system.vertex_count; ++v) field[v] = row[static_cast<std::size_t>(v)].get<double>();
    pair.vector = system.restrict_to_free(field);
    spectrum.pairs.push_back(std::move(pair));
  }
  return spectrum;
}

void save_oracle(const OracleSpectrum& oracle, const Provenance* provenance,
                 const std::string& path) {
  json j;
  j["format"] = "bse-oracle";
  j["version"] = 1;
  j["r_inner"] = oracle.r_inner;
  j["r_outer"] = oracle.r_outer;
  j["dimension"] = oracle.dimension;
  j["m_max"] = oracle.m_max;
  j["lambda_max"] = oracle.lambda_max;

  json modes = json::array();
  for (const auto& mode : oracle.modes) {
    json m;
    m["m"] = mode.m;
    m["lambda"] = mode.lambda;
    m["multiplicity"] = mode.multiplicity;
    m["rho"] = mode.rho;
    m["w"] = mode.w;
    m["dw"] = mode.dw;
    modes.push_back(std::move(m));
  }
  j["modes"] = modes;

  if (provenance) j["provenance"] = provenance_json(provenance);
  write_json_file(j, path);
}

OracleSpectrum load_oracle(const std::string& path) {
  const json j = load_json_file(path, "bse-oracle");
  OracleSpectrum oracle;
  oracle.r_inner = j.value("r_inner", 0.0);
  oracle.r_outer = j.value("r_outer", 0.0);
  oracle.dimension = j.value("dimension", 2);
  oracle.m_max = j.value("m_max", 0);
  oracle.lambda_max = j.value("lambda_max", 0.0);
  for (const auto& m : j.at("modes")) {
    RadialMode mode;
    mode.m = m.at("m").get<int>();
    mode.lambda = m.at("lambda").get<double>();
    mode.multiplicity = m.at("multiplicity").get<int>();
    mode.rho = m.at("rho").get<std::vector<double>>();
    mode.w = m.at("w").get<std::vector<double>>();
    mode.dw = m.at("dw").get<std::vector<double>>();
    oracle.modes.push_back(std::move(mode));
  }
  return oracle;
}

void save_report(const VerificationReport& report, const Provenance* provenance,
                 const std::string& path) {
  json j;
  j["format"] = "bse-report";
  j["version"] = 1;
  j["passed"] = report.all_passed();

  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"name", r.name},
                       {"anchor", r.anchor},
                       {"passed", r.passed},
                       {"warning", r.warning},
                       {"measured", r.measured},
                       {"tolerance", r.tolerance},
                       {"detail", r.detail}});
  }
  j["records"] = records;

  const VerifyConfig& c = report.config;
  j["environment"] = {{"r_inner", c.r_inner},
                      {"r_outer", c.r_outer},
                      {"n_radial", c.n_radial},
                      {"n_angular", c.n_angular},
                      {"k", c.k},
                      {"tol", c.tol},
                      {"m_max", c.m_max},
                      {"lambda_max", c.lambda_max},
                      {"seed", c.seed},
                      {"levels", c.levels},
                      {"conv_n_radial", c.conv_n_radial},
                      {"conv_n_angular", c.conv_n_angular},
                      {"threads", c.threads}};

  if (provenance) j["provenance"] = provenance_json(provenance);
  write_json_file(j, path);
}

void export_vtk(const Mesh& mesh, const Spectrum& spectrum, const DiscreteSystem& system,
                const std::string& title, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");

  std::string header = title.empty() ? std::string("bse eigenfunctions") : title;
  if (header.size() > 255) header.resize(255); // legacy VTK title limit

  out << "# vtk DataFile Version 3.0\n";
  out << header << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  char buffer[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buffer, sizeof(buffer), "%.17g %.17g 0\n", v[0], v[1]);
    out << buffer;
  }
  out << "CELLS " << mesh.triangle_count() << " " << 4 * mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.triangle_count() << "\n";
  for (int i = 0; i < mesh.triangle_count(); ++i) out << "5\n"; // VTK_TRIANGLE

  out << "POINT_DATA " << mesh.vertex_count() << "\n";
  for (std::size_t n = 0; n < spectrum.pairs.size(); ++n) {
    const Eigen::VectorXd field = system.extend_to_vertices(spectrum.pairs[n].vector);
    out << "SCALARS u_" << (n + 1) << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int i = 0; i < field.size(); ++i) {
      std::snprintf(buffer, sizeof(buffer), "%.17g\n", field[i]);
      out << buffer;
    }
  }
  out.flush();
  if (!out)
    throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

void write_wave_csv(const DiscreteSystem& system, const Spectrum& spectrum,
                    const WaveState& state, const std::vector<double>& times,
                    const std::vector<int>& probe_vertices, const Provenance* provenance,
                    const std::string& path) {
  for (int v : probe_vertices)
    if (v < 0 || v >= system.vertex_count)
      throw Error(ErrorKind::InvalidArgument,
                  "wave CSV: probe vertex " + std::to_string(v) + " out of range");

  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");

  if (provenance) {
    out << "# tool_version: " << provenance->tool_version << "\n";
    if (!provenance->config_json.empty()) out << "# config: " << provenance->config_json << "\n";
    for (const auto& [p, h] : provenance->input_hashes) out << "# input: " << p << " " << h << "\n";
    if (!provenance->timestamp.empty()) out << "# timestamp: " << provenance->timestamp << "\n";
  }
  out << "# truncation_residual: " << state.truncation_residual << "\n";

  out << "t,E";
  for (int v : probe_vertices) out << ",u_v" << v;
  out << "\n";

  char buffer[48];
  for (double t : times) {
    const WaveSample sample = evaluate(state, spectrum, t);
    const double kinetic = sample.velocity.dot(system.M.apply(sample.velocity));
    const double potential = sample.displacement.dot(system.A.apply(sample.displacement));
    std::snprintf(buffer, sizeof(buffer), "%.17g", t);
    out << buffer;
    std::snprintf(buffer, sizeof(buffer), ",%.17g", 0.5 * (kinetic + potential));
    out << buffer;
    if (!probe_vertices.empty()) {
      const Eigen::VectorXd field = system.extend_to_vertices(sample.displacement);
      for (int v : probe_vertices) {
        std::snprintf(buffer, sizeof(buffer), ",%.17g", field[v]);
        out << buffer;
      }
    }
    out << "\n";
  }
  out.flush();
  if (!out)
    throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

} // namespace bse
