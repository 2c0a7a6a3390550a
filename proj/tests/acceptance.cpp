// Acceptance suite: end-to-end checks of the solver stack at desk scale,
// one pass/fail line per criterion. Exits nonzero when any criterion fails.
//
// Usage: bse_acceptance <path-to-cli-binary>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bse/assembly.hpp"
#include "bse/eigensolve.hpp"
#include "bse/errors.hpp"
#include "bse/mesh.hpp"
#include "bse/oracle.hpp"
#include "bse/serialize.hpp"
#include "bse/verify.hpp"
#include "bse/wave.hpp"

using namespace bse;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool passed, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", passed ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

void run(int criterion, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [passed, detail] = body();
    report(criterion, name, passed, detail);
  } catch (const std::exception& e) {
    report(criterion, name, false, std::string("exception: ") + e.what());
  }
}

std::string format_g(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.3g", x);
  return buffer;
}

} // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  // Shared fixtures for several criteria.
  const OracleSpectrum oracle = find_modes_auto(1.0, 2.0, 2, 6, 12);
  const Mesh mesh = generate_annulus({1.0, 2.0, 16, 64});
  const DiscreteSystem system = build_system(mesh);
  const Spectrum spectrum = solve_smallest(system, 10, 1e-10);

  // 1. Oracle <-> FEM agreement via Richardson extrapolation, under 60 s.
  ConvergenceStudy study;
  run(1, "oracle-FEM agreement (3 levels from 8x32, 1e-5 relative)", [&] {
    const auto start = std::chrono::steady_clock::now();
    study = convergence_study({1.0, 2.0, 8, 32}, 3, 10, 1e-10, oracle);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double worst = 0.0;
    for (double err : study.extrapolated_rel_error) worst = std::max(worst, err);
    const bool passed = worst <= 1e-5 && seconds < 60.0;
    return std::make_pair(passed, "worst rel err " + format_g(worst) + ", " +
                                      format_g(seconds) + " s");
  });

  // 2. Empirical convergence order for the first five eigenvalues.
  run(2, "convergence order in [1.8, 2.3] for lambda_1..lambda_5", [&] {
    double lo = 1e300, hi = -1e300;
    for (int n = 0; n < 5; ++n) {
      lo = std::min(lo, study.fitted_order[static_cast<std::size_t>(n)]);
      hi = std::max(hi, study.fitted_order[static_cast<std::size_t>(n)]);
    }
    return std::make_pair(lo >= 1.8 && hi <= 2.3,
                          "orders in [" + format_g(lo) + ", " + format_g(hi) + "]");
  });

  // 3. Spectral decomposition: positivity, M-orthonormality, H1 identity.
  run(3, "spectral decomposition suite", [&] {
    bool positive = true;
    for (const auto& pair : spectrum.pairs) positive = positive && pair.lambda > 0.0;

    double orth = 0.0;
    for (std::size_t i = 0; i < spectrum.pairs.size(); ++i)
      for (std::size_t j = 0; j < spectrum.pairs.size(); ++j) {
        const double g =
            spectrum.pairs[i].vector.dot(system.M.apply(spectrum.pairs[j].vector));
        orth = std::max(orth, std::abs(g - (i == j ? 1.0 : 0.0)));
      }

    double h1_dev = 0.0;
    for (const auto& pair : spectrum.pairs) {
      const double a_norm = pair.vector.dot(system.A.apply(pair.vector));
      h1_dev = std::max(h1_dev, std::abs(a_norm - pair.lambda) / pair.lambda);
    }

    const bool passed = positive && orth <= 1e-10 && h1_dev <= 1e-9;
    return std::make_pair(passed, "all lambda > 0: " + std::string(positive ? "yes" : "no") +
                                      ", orthonormality defect " + format_g(orth) +
                                      ", H1-identity deviation " + format_g(h1_dev));
  });

  // 4. Variational characterization: Rayleigh bound and min-max.
  run(4, "Rayleigh + Courant-Fischer suite", [&] {
    const CheckRecord rayleigh = check_rayleigh(system, spectrum, 1000, kDefaultSeed);
    const DiscreteSystem small = build_system(generate_annulus({1.0, 2.0, 5, 20}));
    bool cf_ok = true;
    for (int n = 1; n <= 4; ++n)
      cf_ok = cf_ok && check_courant_fischer(small, n, 50, kDefaultSeed).passed;
    return std::make_pair(rayleigh.passed && cf_ok,
                          "1000 quotients above lambda_1; min-max on a " +
                              std::to_string(small.dimension()) + "-dof pencil for n = 1..4");
  });

  // 5. Ground state: simple, one-signed; u2 as negative control.
  run(5, "ground state simplicity and sign", [&] {
    const CheckRecord ground = check_ground_state(spectrum, system, mesh);
    const CheckRecord control = check_first_excited_sign_change(spectrum, system, mesh);
    return std::make_pair(ground.passed && control.passed,
                          "gap " + format_g(ground.measured) + "; u_2 changes sign: " +
                              (control.passed ? "yes" : "no"));
  });

  // 6. Radial structure and rotation invariance.
  run(6, "radial symmetry, monotonicity, rotation invariance", [&] {
    const CheckRecord radial = check_radial(spectrum, system, mesh, oracle);
    const MonotoneReport mono = check_monotone(oracle.modes.front(), 2);
    const CheckRecord rotation = check_rotation_invariance(mesh, 10, 1e-10, 0.7337);
    const bool passed = radial.passed && mono.passed &&
                        mono.max_identity_residual <= 1e-9 && rotation.passed;
    return std::make_pair(passed, "profile identity residual " +
                                      format_g(mono.max_identity_residual) +
                                      ", spectrum rotation deviation " +
                                      format_g(rotation.measured));
  });

  // 7. Standing waves: periodicity and energy conservation.
  run(7, "wave synthesis suite", [&] {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(system.vertex_count);

    const Eigen::VectorXd w0_single = system.extend_to_vertices(spectrum.pairs[0].vector);
    const WaveState single = project_initial_data(system, spectrum, w0_single, zero);
    const double period = 2.0 * M_PI / single.omegas.front();
    const WaveSample at0 = evaluate(single, spectrum, 0.0);
    const WaveSample atT = evaluate(single, spectrum, period);
    const double periodicity = (atT.displacement - at0.displacement).cwiseAbs().maxCoeff() /
                               at0.displacement.cwiseAbs().maxCoeff();

    Eigen::VectorXd w0_free = Eigen::VectorXd::Zero(system.dimension());
    for (int n = 0; n < 5; ++n) w0_free += spectrum.pairs[static_cast<std::size_t>(n)].vector;
    const WaveState mixed =
        project_initial_data(system, spectrum, system.extend_to_vertices(w0_free), zero);
    const double horizon = 100.0 / mixed.omegas.front();
    const double e0 = energy(system, spectrum, mixed, 0.0);
    double drift = 0.0;
    for (int s = 1; s <= 50; ++s) {
      const double t = horizon * s / 50;
      drift = std::max(drift, std::abs(energy(system, spectrum, mixed, t) - e0) / e0);
    }

    const bool passed = periodicity <= 1e-12 && drift <= 1e-9;
    return std::make_pair(passed, "periodicity defect " + format_g(periodicity) +
                                      ", energy drift " + format_g(drift) + " over t in [0, " +
                                      format_g(horizon) + "]");
  });

  // 8. Iterative solver against the dense decomposition on small pencils.
  run(8, "iterative vs dense spectra on pencils up to 300 dofs", [&] {
    double worst = 0.0;
    int checked = 0;
    for (const AnnulusParams params :
         {AnnulusParams{1.0, 2.0, 2, 8}, AnnulusParams{1.0, 2.0, 3, 12},
          AnnulusParams{1.0, 2.0, 5, 20}, AnnulusParams{1.0, 2.0, 8, 32}}) {
      const DiscreteSystem s = build_system(generate_annulus(params));
      if (s.dimension() > 300) continue;
      const int k = std::min(10, s.dimension() - 1);
      const Spectrum iterative = solve_smallest(s, k, 1e-10);
      const Spectrum dense = solve_dense(s);
      for (int i = 0; i < k; ++i) {
        const double want = dense.pairs[static_cast<std::size_t>(i)].lambda;
        worst = std::max(worst,
                         std::abs(iterative.pairs[static_cast<std::size_t>(i)].lambda - want) /
                             want);
      }
      ++checked;
    }
    return std::make_pair(worst <= 1e-9 && checked == 4,
                          std::to_string(checked) + " meshes, worst rel deviation " +
                              format_g(worst));
  });

  // 9. Serialization contracts and the CLI preset.
  run(9, "mesh serialization, validation controls, CLI preset", [&] {
    std::vector<std::string> problems;

    const std::string mesh_path = "/tmp/bse_acceptance_mesh.txt";
    save_mesh(mesh, mesh_path);
    if (!(load_mesh(mesh_path) == mesh)) problems.push_back("round trip not the identity");
    std::remove(mesh_path.c_str());

    try {
      std::istringstream bad(
          "bse-mesh 1\nvertices 4\n0 0\n1 0\n0 1\n1 1\n"
          "triangles 2\n0 2 1\n1 2 3\nboundary 4\n0 1 g0\n0 2 g0\n1 3 g1\n2 3 g1\n");
      read_mesh(bad, "control");
      problems.push_back("negative-area control not rejected");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Invariant) problems.push_back("negative-area: wrong error kind");
    }

    try {
      std::istringstream bad(
          "bse-mesh 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\n"
          "boundary 3\n0 1 gZ\n1 2 g1\n2 0 g0\n");
      read_mesh(bad, "control");
      problems.push_back("bad-label control not rejected");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Format) problems.push_back("bad-label: wrong error kind");
    }

    try {
      load_mesh("/nonexistent/bse-missing.txt");
      problems.push_back("missing-file control not rejected");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Io) problems.push_back("missing-file: wrong error kind");
    }

    if (cli.empty()) {
      problems.push_back("no CLI path given");
    } else {
      const std::string report_path = "/tmp/bse_acceptance_report.json";
      const int preset = std::system(
          (cli + " verify --preset annulus-default -o " + report_path + " > /dev/null").c_str());
      if (preset != 0) problems.push_back("verify preset exited " + std::to_string(preset));
      std::remove(report_path.c_str());

      const int missing =
          std::system((cli + " solve --mesh /nonexistent/m.txt -o /tmp/bse_acc_s.json "
                             "2> /dev/null")
                          .c_str());
      if (WEXITSTATUS(missing) != 3)
        problems.push_back("missing-mesh solve exited " + std::to_string(WEXITSTATUS(missing)));

      const int usage = std::system((cli + " solve --definitely-not-a-flag 2> /dev/null").c_str());
      if (WEXITSTATUS(usage) != 2)
        problems.push_back("unknown flag exited " + std::to_string(WEXITSTATUS(usage)));
    }

    std::string detail = "round trip, 3 validation controls, CLI preset + exit codes";
    if (!problems.empty()) {
      detail = problems.front();
      for (std::size_t i = 1; i < problems.size(); ++i) detail += "; " + problems[i];
    }
    return std::make_pair(problems.empty(), detail);
  });

  std::printf("%d/9 criteria passed\n", 9 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
