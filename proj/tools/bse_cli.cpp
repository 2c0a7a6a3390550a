// bse command-line tool. Everything goes through the C API in bse.h; this
// translation unit never touches the C++ core directly.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bse.h"

namespace {

using nlohmann::json;

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buffer;
}

int fail(const char* what, bse_status status) {
  std::fprintf(stderr, "error: %s: %s\n", what, bse_last_error());
  return status == BSE_ERR_INVALID_ARGUMENT ? 2 : 3;
}

struct ProvenanceHolder {
  std::string config;
  std::string timestamp;
  std::vector<std::string> inputs;
  std::vector<const char*> input_ptrs;
  bse_provenance raw{};

  const bse_provenance* get() {
    raw.config_json = config.c_str();
    raw.timestamp = timestamp.c_str();
    input_ptrs.clear();
    for (const auto& p : inputs) input_ptrs.push_back(p.c_str());
    raw.input_paths = input_ptrs.empty() ? nullptr : input_ptrs.data();
    raw.input_count = static_cast<int>(input_ptrs.size());
    return &raw;
  }
};

double parse_lambda_max(const std::string& text) {
  if (text == "auto") return 0.0;
  return std::stod(text);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"bse: eigenmodes of the coupled bulk/surface membrane problem"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bse_version()));

  // ---- mesh ----------------------------------------------------------------
  auto* cmd_mesh = app.add_subcommand("mesh", "generate an annulus mesh file");
  double r_inner = 1.0, r_outer = 2.0;
  int n_radial = 16, n_angular = 64, refine_levels = 0;
  double rotate_angle = 0.0;
  std::string mesh_out;
  cmd_mesh->add_option("--r-inner", r_inner, "inner radius (Gamma1 circle)");
  cmd_mesh->add_option("--r-outer", r_outer, "outer radius (Gamma0 circle)");
  cmd_mesh->add_option("--n-radial", n_radial, "radial subdivisions (>= 2)");
  cmd_mesh->add_option("--n-angular", n_angular, "angular subdivisions (>= 8)");
  cmd_mesh->add_option("--refine", refine_levels, "uniform refinement levels to apply");
  cmd_mesh->add_option("--rotate", rotate_angle, "rotate the mesh by this angle (radians)");
  cmd_mesh->add_option("-o,--output", mesh_out, "output mesh path")->required();

  // ---- solve ----------------------------------------------------------------
  auto* cmd_solve = app.add_subcommand("solve", "solve for the smallest eigenpairs of a mesh");
  std::string solve_mesh, solve_out;
  int k = 10;
  double tol = 1e-10;
  bool dense = false, with_vectors = false;
  cmd_solve->add_option("--mesh", solve_mesh, "input mesh path")->required();
  cmd_solve->add_option("-k,--count", k, "number of eigenpairs");
  cmd_solve->add_option("--tol", tol, "residual tolerance");
  cmd_solve->add_flag("--dense", dense, "use the dense reference path (dim <= 2000)");
  cmd_solve->add_flag("--with-vectors", with_vectors, "store eigenvectors in the output");
  cmd_solve->add_option("-o,--output", solve_out, "output spectrum path (JSON)")->required();

  // ---- oracle ----------------------------------------------------------------
  auto* cmd_oracle = app.add_subcommand("oracle", "radial shooting oracle for the annulus");
  double o_r_inner = 1.0, o_r_outer = 2.0;
  int o_dimension = 2, m_max = 6, min_values = 12, threads = 1;
  std::string lambda_max_text = "auto";
  std::string oracle_out;
  cmd_oracle->add_option("--r-inner", o_r_inner, "inner radius R1");
  cmd_oracle->add_option("--r-outer", o_r_outer, "outer radius R2");
  cmd_oracle->add_option("--dimension", o_dimension, "space dimension N (m_max > 0 needs N = 2)");
  cmd_oracle->add_option("--m-max", m_max, "largest angular mode");
  cmd_oracle->add_option("--lambda-max", lambda_max_text, "scan ceiling, or 'auto'");
  cmd_oracle->add_option("--min-values", min_values, "values to capture when lambda-max is auto");
  cmd_oracle->add_option("--threads", threads, "worker threads for the per-mode scans");
  cmd_oracle->add_option("-o,--output", oracle_out, "output oracle path (JSON)")->required();

  // ---- verify ----------------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "run the verification suite");
  std::string preset;
  std::string report_out;
  bse_verify_params params;
  bse_verify_params_init(&params);
  std::string v_lambda_max_text = "auto";
  cmd_verify->add_option("--preset", preset, "named preset (annulus-default)")
      ->check(CLI::IsMember({"annulus-default"}));
  cmd_verify->add_option("--r-inner", params.r_inner, "inner radius");
  cmd_verify->add_option("--r-outer", params.r_outer, "outer radius");
  cmd_verify->add_option("--n-radial", params.n_radial, "radial subdivisions of the check mesh");
  cmd_verify->add_option("--n-angular", params.n_angular, "angular subdivisions of the check mesh");
  cmd_verify->add_option("-k,--count", params.k, "number of eigenpairs");
  cmd_verify->add_option("--tol", params.tol, "residual tolerance");
  cmd_verify->add_option("--m-max", params.m_max, "largest oracle angular mode");
  cmd_verify->add_option("--lambda-max", v_lambda_max_text, "oracle scan ceiling, or 'auto'");
  cmd_verify->add_option("--seed", params.seed, "seed for randomized checks");
  cmd_verify->add_option("--levels", params.levels, "convergence-study refinement levels");
  cmd_verify->add_option("--threads", params.threads, "worker threads for the oracle");
  cmd_verify->add_option("-o,--output", report_out, "also write the report as JSON");

  // ---- wave ----------------------------------------------------------------
  auto* cmd_wave = app.add_subcommand("wave", "synthesize a wave solution and export energy");
  std::string wave_mesh, wave_spectrum, wave_init, wave_out;
  double t_end = 10.0;
  int samples = 200;
  std::vector<int> probes;
  cmd_wave->add_option("--mesh", wave_mesh, "mesh path")->required();
  cmd_wave->add_option("--spectrum", wave_spectrum, "spectrum path (saved with vectors)")->required();
  cmd_wave->add_option("--init", wave_init, "initial-data spec (JSON)")->required();
  cmd_wave->add_option("--t-end", t_end, "time horizon");
  cmd_wave->add_option("--samples", samples, "number of time samples");
  cmd_wave->add_option("--probe", probes, "vertex indices to record displacement at");
  cmd_wave->add_option("-o,--output", wave_out, "output CSV path")->required();

  // ---- export-vtk -------------------------------------------------------------
  auto* cmd_vtk = app.add_subcommand("export-vtk", "write eigenfunctions as a VTK grid");
  std::string vtk_mesh, vtk_spectrum, vtk_out;
  cmd_vtk->add_option("--mesh", vtk_mesh, "mesh path")->required();
  cmd_vtk->add_option("--spectrum", vtk_spectrum, "spectrum path (saved with vectors)")->required();
  cmd_vtk->add_option("-o,--output", vtk_out, "output VTK path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (cmd_mesh->parsed()) {
    bse_mesh* mesh = nullptr;
    bse_status st = bse_mesh_annulus(r_inner, r_outer, n_radial, n_angular, &mesh);
    if (st != BSE_OK) return fail("mesh", st);
    for (int level = 0; level < refine_levels; ++level) {
      bse_mesh* refined = nullptr;
      st = bse_mesh_refine(mesh, &refined);
      bse_mesh_free(mesh);
      if (st != BSE_OK) return fail("mesh refine", st);
      mesh = refined;
    }
    if (rotate_angle != 0.0) {
      bse_mesh* rotated = nullptr;
      st = bse_mesh_rotate(mesh, rotate_angle, &rotated);
      bse_mesh_free(mesh);
      if (st != BSE_OK) return fail("mesh rotate", st);
      mesh = rotated;
    }
    st = bse_mesh_save(mesh, mesh_out.c_str());
    if (st != BSE_OK) {
      bse_mesh_free(mesh);
      return fail("mesh save", st);
    }
    std::printf("wrote %s: %d vertices, %d triangles, %d Gamma0 + %d Gamma1 edges\n",
                mesh_out.c_str(), bse_mesh_vertex_count(mesh), bse_mesh_triangle_count(mesh),
                bse_mesh_boundary_count(mesh, BSE_GAMMA0),
                bse_mesh_boundary_count(mesh, BSE_GAMMA1));
    bse_mesh_free(mesh);
    return 0;
  }

  if (cmd_solve->parsed()) {
    bse_mesh* mesh = nullptr;
    bse_status st = bse_mesh_load(solve_mesh.c_str(), &mesh);
    if (st != BSE_OK) return fail("solve: mesh load", st);
    bse_system* system = nullptr;
    st = bse_system_build(mesh, &system);
    bse_mesh_free(mesh);
    if (st != BSE_OK) return fail("solve: system build", st);

    bse_spectrum* spectrum = nullptr;
    st = dense ? bse_solve_dense(system, &spectrum)
               : bse_solve_smallest(system, k, tol, &spectrum);
    if (st != BSE_OK) {
      bse_system_free(system);
      return fail("solve", st);
    }

    ProvenanceHolder prov;
    prov.config = json{{"subcommand", "solve"}, {"mesh", solve_mesh},     {"k", k},
                       {"tol", tol},           {"dense", dense},         {"with_vectors", with_vectors},
                       {"output", solve_out}}
                      .dump();
    prov.timestamp = iso_timestamp();
    prov.inputs = {solve_mesh};
    st = bse_spectrum_save(spectrum, system, with_vectors ? 1 : 0, prov.get(), solve_out.c_str());
    const int count = bse_spectrum_count(spectrum);
    if (st == BSE_OK) {
      std::printf("wrote %s: %d eigenvalues", solve_out.c_str(), count);
      const int shown = count < 5 ? count : 5;
      for (int i = 0; i < shown; ++i) std::printf("%s%.12g", i ? ", " : " [", bse_spectrum_lambda(spectrum, i));
      std::printf(count > 5 ? ", ...]\n" : "]\n");
    }
    bse_spectrum_free(spectrum);
    bse_system_free(system);
    return st == BSE_OK ? 0 : fail("solve: save", st);
  }

  if (cmd_oracle->parsed()) {
    double lambda_max = 0.0;
    try {
      lambda_max = parse_lambda_max(lambda_max_text);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --lambda-max expects a number or 'auto'\n");
      return 2;
    }
    bse_oracle* oracle = nullptr;
    bse_status st = bse_oracle_find_modes(o_r_inner, o_r_outer, o_dimension, m_max, lambda_max,
                                          min_values, threads, &oracle);
    if (st != BSE_OK) return fail("oracle", st);

    ProvenanceHolder prov;
    prov.config = json{{"subcommand", "oracle"},   {"r_inner", o_r_inner},
                       {"r_outer", o_r_outer},     {"dimension", o_dimension},
                       {"m_max", m_max},           {"lambda_max", lambda_max_text},
                       {"min_values", min_values}, {"threads", threads},
                       {"output", oracle_out}}
                      .dump();
    prov.timestamp = iso_timestamp();
    st = bse_oracle_save(oracle, prov.get(), oracle_out.c_str());
    if (st == BSE_OK)
      std::printf("wrote %s: %d radial modes\n", oracle_out.c_str(),
                  bse_oracle_mode_count(oracle));
    bse_oracle_free(oracle);
    return st == BSE_OK ? 0 : fail("oracle: save", st);
  }

  if (cmd_verify->parsed()) {
    double lambda_max = 0.0;
    try {
      lambda_max = parse_lambda_max(v_lambda_max_text);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --lambda-max expects a number or 'auto'\n");
      return 2;
    }
    params.lambda_max = lambda_max;
    // --preset annulus-default keeps the initialized defaults.

    bse_report* report = nullptr;
    bse_status st = bse_verify_run(&params, &report);
    if (st != BSE_OK) return fail("verify", st);
    bse_report_print(report);

    if (!report_out.empty()) {
      ProvenanceHolder prov;
      prov.config = json{{"subcommand", "verify"},
                         {"preset", preset},
                         {"r_inner", params.r_inner},
                         {"r_outer", params.r_outer},
                         {"n_radial", params.n_radial},
                         {"n_angular", params.n_angular},
                         {"k", params.k},
                         {"tol", params.tol},
                         {"m_max", params.m_max},
                         {"lambda_max", v_lambda_max_text},
                         {"seed", params.seed},
                         {"levels", params.levels},
                         {"threads", params.threads},
                         {"output", report_out}}
                        .dump();
      prov.timestamp = iso_timestamp();
      st = bse_report_save(report, prov.get(), report_out.c_str());
      if (st != BSE_OK) {
        bse_report_free(report);
        return fail("verify: save", st);
      }
    }
    const int passed = bse_report_passed(report);
    bse_report_free(report);
    return passed ? 0 : 1;
  }

  if (cmd_wave->parsed()) {
    ProvenanceHolder prov;
    prov.config = json{{"subcommand", "wave"},  {"mesh", wave_mesh}, {"spectrum", wave_spectrum},
                       {"init", wave_init},     {"t_end", t_end},    {"samples", samples},
                       {"probes", probes},      {"output", wave_out}}
                      .dump();
    prov.timestamp = iso_timestamp();
    prov.inputs = {wave_mesh, wave_spectrum, wave_init};
    const bse_status st =
        bse_wave_run(wave_mesh.c_str(), wave_spectrum.c_str(), wave_init.c_str(), t_end, samples,
                     probes.empty() ? nullptr : probes.data(), static_cast<int>(probes.size()),
                     prov.get(), wave_out.c_str());
    if (st != BSE_OK) return fail("wave", st);
    std::printf("wrote %s\n", wave_out.c_str());
    return 0;
  }

  if (cmd_vtk->parsed()) {
    char mesh_hash[32] = {0};
    char spec_hash[32] = {0};
    bse_hash_file(vtk_mesh.c_str(), mesh_hash, sizeof(mesh_hash));
    bse_hash_file(vtk_spectrum.c_str(), spec_hash, sizeof(spec_hash));
    const std::string title = std::string("bse ") + bse_version() + " mesh=" + mesh_hash +
                              " spectrum=" + spec_hash;
    const bse_status st =
        bse_export_vtk(vtk_mesh.c_str(), vtk_spectrum.c_str(), title.c_str(), vtk_out.c_str());
    if (st != BSE_OK) return fail("export-vtk", st);
    std::printf("wrote %s\n", vtk_out.c_str());
    return 0;
  }

  return 2;
}
