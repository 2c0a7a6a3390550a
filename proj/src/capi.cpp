#include "bse.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bse/assembly.hpp"
#include "bse/eigensolve.hpp"
#include "bse/errors.hpp"
#include "bse/mesh.hpp"
#include "bse/oracle.hpp"
#include "bse/serialize.hpp"
#include "bse/verify.hpp"
#include "bse/version.hpp"
#include "bse/wave.hpp"

struct bse_mesh {
  bse::Mesh mesh;
};
struct bse_system {
  bse::DiscreteSystem system;
};
struct bse_spectrum {
  bse::Spectrum spectrum;
};
struct bse_oracle {
  bse::OracleSpectrum oracle;
};
struct bse_report {
  bse::VerificationReport report;
};

namespace {

thread_local std::string g_last_error;

bse_status status_of(bse::ErrorKind kind) {
  switch (kind) {
    case bse::ErrorKind::InvalidArgument: return BSE_ERR_INVALID_ARGUMENT;
    case bse::ErrorKind::Io: return BSE_ERR_IO;
    case bse::ErrorKind::Format: return BSE_ERR_FORMAT;
    case bse::ErrorKind::Invariant: return BSE_ERR_INVARIANT;
    case bse::ErrorKind::Numeric: return BSE_ERR_NUMERIC;
    case bse::ErrorKind::NonConvergence: return BSE_ERR_NO_CONVERGENCE;
  }
  return BSE_ERR_NUMERIC;
}

template <typename F>
bse_status guarded(F&& f) {
  try {
    f();
    return BSE_OK;
  } catch (const bse::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BSE_ERR_NUMERIC;
  }
}

bse_status invalid(const char* message) {
  g_last_error = message;
  return BSE_ERR_INVALID_ARGUMENT;
}

bse::Provenance convert_provenance(const bse_provenance* p) {
  bse::Provenance out;
  out.tool_version = bse::kVersion;
  if (!p) return out;
  if (p->config_json) out.config_json = p->config_json;
  if (p->timestamp) out.timestamp = p->timestamp;
  for (int i = 0; i < p->input_count; ++i) {
    const char* path = p->input_paths[i];
    out.input_hashes.emplace_back(path, bse::file_content_hash(path));
  }
  return out;
}

} // namespace

extern "C" {

const char* bse_version(void) { return bse::kVersion; }

const char* bse_last_error(void) { return g_last_error.c_str(); }

bse_status bse_hash_file(const char* path, char* out, int out_size) {
  if (!path || !out || out_size < 1) return invalid("bse_hash_file: bad arguments");
  return guarded([&] {
    const std::string hash = bse::file_content_hash(path);
    std::strncpy(out, hash.c_str(), static_cast<std::size_t>(out_size - 1));
    out[out_size - 1] = '\0';
  });
}

/* ---- mesh ---------------------------------------------------------------- */

bse_status bse_mesh_annulus(double r_inner, double r_outer, int n_radial, int n_angular,
                            bse_mesh** out) {
  if (!out) return invalid("bse_mesh_annulus: null output");
  return guarded([&] {
    auto handle = new bse_mesh{bse::generate_annulus({r_inner, r_outer, n_radial, n_angular})};
    *out = handle;
  });
}

bse_status bse_mesh_refine(const bse_mesh* mesh, bse_mesh** out) {
  if (!mesh || !out) return invalid("bse_mesh_refine: null argument");
  return guarded([&] { *out = new bse_mesh{bse::refine_uniform(mesh->mesh)}; });
}

bse_status bse_mesh_rotate(const bse_mesh* mesh, double angle, bse_mesh** out) {
  if (!mesh || !out) return invalid("bse_mesh_rotate: null argument");
  return guarded([&] { *out = new bse_mesh{bse::rotate(mesh->mesh, angle)}; });
}

bse_status bse_mesh_load(const char* path, bse_mesh** out) {
  if (!path || !out) return invalid("bse_mesh_load: null argument");
  return guarded([&] { *out = new bse_mesh{bse::load_mesh(path)}; });
}

bse_status bse_mesh_save(const bse_mesh* mesh, const char* path) {
  if (!mesh || !path) return invalid("bse_mesh_save: null argument");
  return guarded([&] { bse::save_mesh(mesh->mesh, path); });
}

void bse_mesh_free(bse_mesh* mesh) { delete mesh; }

int bse_mesh_vertex_count(const bse_mesh* mesh) { return mesh ? mesh->mesh.vertex_count() : 0; }

int bse_mesh_triangle_count(const bse_mesh* mesh) {
  return mesh ? mesh->mesh.triangle_count() : 0;
}

int bse_mesh_boundary_count(const bse_mesh* mesh, bse_boundary_label label) {
  if (!mesh) return 0;
  return mesh->mesh.boundary_count(label == BSE_GAMMA0 ? bse::BoundaryLabel::Gamma0
                                                       : bse::BoundaryLabel::Gamma1);
}

/* ---- discrete system ------------------------------------------------------ */

bse_status bse_system_build(const bse_mesh* mesh, bse_system** out) {
  if (!mesh || !out) return invalid("bse_system_build: null argument");
  return guarded([&] { *out = new bse_system{bse::build_system(mesh->mesh)}; });
}

void bse_system_free(bse_system* system) { delete system; }

int bse_system_dimension(const bse_system* system) {
  return system ? system->system.dimension() : 0;
}

/* ---- eigensolver ----------------------------------------------------------- */

bse_status bse_solve_smallest(const bse_system* system, int k, double tol, bse_spectrum** out) {
  if (!system || !out) return invalid("bse_solve_smallest: null argument");
  return guarded([&] { *out = new bse_spectrum{bse::solve_smallest(system->system, k, tol)}; });
}

bse_status bse_solve_dense(const bse_system* system, bse_spectrum** out) {
  if (!system || !out) return invalid("bse_solve_dense: null argument");
  return guarded([&] { *out = new bse_spectrum{bse::solve_dense(system->system)}; });
}

void bse_spectrum_free(bse_spectrum* spectrum) { delete spectrum; }

int bse_spectrum_count(const bse_spectrum* spectrum) {
  return spectrum ? static_cast<int>(spectrum->spectrum.pairs.size()) : 0;
}

double bse_spectrum_lambda(const bse_spectrum* spectrum, int i) {
  if (!spectrum || i < 0 || i >= bse_spectrum_count(spectrum)) return 0.0;
  return spectrum->spectrum.pairs[static_cast<std::size_t>(i)].lambda;
}

double bse_spectrum_residual(const bse_spectrum* spectrum, int i) {
  if (!spectrum || i < 0 || i >= bse_spectrum_count(spectrum)) return 0.0;
  return spectrum->spectrum.pairs[static_cast<std::size_t>(i)].residual;
}

bse_status bse_spectrum_save(const bse_spectrum* spectrum, const bse_system* system,
                             int with_vectors, const bse_provenance* provenance,
                             const char* path) {
  if (!spectrum || !system || !path) return invalid("bse_spectrum_save: null argument");
  return guarded([&] {
    const bse::Provenance p = convert_provenance(provenance);
    bse::save_spectrum(spectrum->spectrum, system->system, with_vectors != 0,
                       provenance ? &p : nullptr, path);
  });
}

bse_status bse_spectrum_load(const char* path, const bse_system* system, bse_spectrum** out) {
  if (!path || !system || !out) return invalid("bse_spectrum_load: null argument");
  return guarded([&] { *out = new bse_spectrum{bse::load_spectrum(path, system->system)}; });
}

/* ---- radial oracle --------------------------------------------------------- */

bse_status bse_oracle_find_modes(double r_inner, double r_outer, int dimension, int m_max,
                                 double lambda_max, int min_values, int threads,
                                 bse_oracle** out) {
  if (!out) return invalid("bse_oracle_find_modes: null output");
  return guarded([&] {
    if (lambda_max > 0.0)
      *out = new bse_oracle{
          bse::find_modes(r_inner, r_outer, dimension, m_max, lambda_max, threads)};
    else
      *out = new bse_oracle{
          bse::find_modes_auto(r_inner, r_outer, dimension, m_max, min_values, threads)};
  });
}

void bse_oracle_free(bse_oracle* oracle) { delete oracle; }

int bse_oracle_mode_count(const bse_oracle* oracle) {
  return oracle ? static_cast<int>(oracle->oracle.modes.size()) : 0;
}

double bse_oracle_lambda(const bse_oracle* oracle, int i) {
  if (!oracle || i < 0 || i >= bse_oracle_mode_count(oracle)) return 0.0;
  return oracle->oracle.modes[static_cast<std::size_t>(i)].lambda;
}

int bse_oracle_multiplicity(const bse_oracle* oracle, int i) {
  if (!oracle || i < 0 || i >= bse_oracle_mode_count(oracle)) return 0;
  return oracle->oracle.modes[static_cast<std::size_t>(i)].multiplicity;
}

int bse_oracle_angular_mode(const bse_oracle* oracle, int i) {
  if (!oracle || i < 0 || i >= bse_oracle_mode_count(oracle)) return 0;
  return oracle->oracle.modes[static_cast<std::size_t>(i)].m;
}

bse_status bse_oracle_save(const bse_oracle* oracle, const bse_provenance* provenance,
                           const char* path) {
  if (!oracle || !path) return invalid("bse_oracle_save: null argument");
  return guarded([&] {
    const bse::Provenance p = convert_provenance(provenance);
    bse::save_oracle(oracle->oracle, provenance ? &p : nullptr, path);
  });
}

/* ---- verification ---------------------------------------------------------- */

void bse_verify_params_init(bse_verify_params* params) {
  if (!params) return;
  params->r_inner = 1.0;
  params->r_outer = 2.0;
  params->n_radial = 16;
  params->n_angular = 64;
  params->k = 10;
  params->tol = 1e-10;
  params->m_max = 6;
  params->lambda_max = 0.0;
  params->seed = 0x5EED;
  params->levels = 3;
  params->conv_n_radial = 8;
  params->conv_n_angular = 32;
  params->threads = 1;
}

bse_status bse_verify_run(const bse_verify_params* params, bse_report** out) {
  if (!params || !out) return invalid("bse_verify_run: null argument");
  return guarded([&] {
    bse::VerifyConfig config;
    config.r_inner = params->r_inner;
    config.r_outer = params->r_outer;
    config.n_radial = params->n_radial;
    config.n_angular = params->n_angular;
    config.k = params->k;
    config.tol = params->tol;
    config.m_max = params->m_max;
    config.lambda_max = params->lambda_max;
    config.seed = params->seed;
    config.levels = params->levels;
    config.conv_n_radial = params->conv_n_radial;
    config.conv_n_angular = params->conv_n_angular;
    config.threads = params->threads;
    *out = new bse_report{bse::run_verification(config)};
  });
}

void bse_report_free(bse_report* report) { delete report; }

int bse_report_passed(const bse_report* report) {
  return report && report->report.all_passed() ? 1 : 0;
}

int bse_report_record_count(const bse_report* report) {
  return report ? static_cast<int>(report->report.records.size()) : 0;
}

bse_status bse_report_print(const bse_report* report) {
  if (!report) return invalid("bse_report_print: null argument");
  return guarded([&] { bse::print_report_table(report->report, std::cout); });
}

bse_status bse_report_save(const bse_report* report, const bse_provenance* provenance,
                           const char* path) {
  if (!report || !path) return invalid("bse_report_save: null argument");
  return guarded([&] {
    const bse::Provenance p = convert_provenance(provenance);
    bse::save_report(report->report, provenance ? &p : nullptr, path);
  });
}

/* ---- wave synthesis --------------------------------------------------------- */

namespace {

Eigen::VectorXd initial_field_from_spec(const nlohmann::json& j, const char* modes_key,
                                        const char* vertex_key, const bse::DiscreteSystem& system,
                                        const bse::Spectrum& spectrum) {
  const bool has_modes = j.contains(modes_key);
  const bool has_vertex = j.contains(vertex_key);
  if (has_modes && has_vertex)
    throw bse::Error(bse::ErrorKind::Format,
                     std::string("initial data: give either ") + modes_key + " or " + vertex_key +
                         ", not both");

  Eigen::VectorXd field = Eigen::VectorXd::Zero(system.vertex_count);
  if (has_vertex) {
    const auto& row = j.at(vertex_key);
    if (static_cast<int>(row.size()) != system.vertex_count)
      throw bse::Error(bse::ErrorKind::Format,
                       std::string("initial data: ") + vertex_key +
                           " length does not match the mesh vertex count");
    for (int v = 0; v < system.vertex_count; ++v) field[v] = row[static_cast<std::size_t>(v)].get<double>();
  } else if (has_modes) {
    for (const auto& [key, value] : j.at(modes_key).items()) {
      const int n = std::stoi(key);
      if (n < 1 || n > static_cast<int>(spectrum.pairs.size()))
        throw bse::Error(bse::ErrorKind::InvalidArgument,
                         "initial data: mode index " + key + " outside the spectrum");
      field += value.get<double>() *
               system.extend_to_vertices(spectrum.pairs[static_cast<std::size_t>(n - 1)].vector);
    }
  }
  return field;
}

} // namespace

bse_status bse_wave_run(const char* mesh_path, const char* spectrum_path, const char* init_path,
                        double t_end, int samples, const int* probe_vertices, int probe_count,
                        const bse_provenance* provenance, const char* out_csv) {
  if (!mesh_path || !spectrum_path || !init_path || !out_csv)
    return invalid("bse_wave_run: null argument");
  if (samples < 2) return invalid("bse_wave_run: need at least 2 samples");
  if (!(t_end > 0.0)) return invalid("bse_wave_run: t_end must be positive");
  return guarded([&] {
    const bse::Mesh mesh = bse::load_mesh(mesh_path);
    const bse::DiscreteSystem system = bse::build_system(mesh);
    const bse::Spectrum spectrum = bse::load_spectrum(spectrum_path, system);

    std::ifstream in(init_path);
    if (!in) throw bse::Error(bse::ErrorKind::Io, std::string("cannot open '") + init_path + "'");
    nlohmann::json spec;
    try {
      in >> spec;
    } catch (const nlohmann::json::parse_error& e) {
      throw bse::Error(bse::ErrorKind::Format, std::string(init_path) + ": " + e.what());
    }

    const Eigen::VectorXd w0 = initial_field_from_spec(spec, "w0_modes", "w0_vertex", system, spectrum);
    const Eigen::VectorXd w1 = initial_field_from_spec(spec, "w1_modes", "w1_vertex", system, spectrum);

    const bse::WaveState state = bse::project_initial_data(system, spectrum, w0, w1);

    std::vector<double> times(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
      times[static_cast<std::size_t>(i)] = t_end * i / (samples - 1);

    std::vector<int> probes(probe_vertices, probe_vertices + probe_count);
    const bse::Provenance p = convert_provenance(provenance);
    bse::write_wave_csv(system, spectrum, state, times, probes, provenance ? &p : nullptr,
                        out_csv);
  });
}

/* ---- VTK export -------------------------------------------------------------- */

bse_status bse_export_vtk(const char* mesh_path, const char* spectrum_path, const char* title,
                          const char* out_path) {
  if (!mesh_path || !spectrum_path || !out_path) return invalid("bse_export_vtk: null argument");
  return guarded([&] {
    const bse::Mesh mesh = bse::load_mesh(mesh_path);
    const bse::DiscreteSystem system = bse::build_system(mesh);
    const bse::Spectrum spectrum = bse::load_spectrum(spectrum_path, system);
    bse::export_vtk(mesh, spectrum, system, title ? title : "", out_path);
  });
}

} // extern "C"
