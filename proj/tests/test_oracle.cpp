#include <doctest.h>

#include <cmath>
#include <vector>

#include "bse/assembly.hpp"
#include "bse/eigensolve.hpp"
#include "bse/errors.hpp"
#include "bse/mesh.hpp"
#include "bse/oracle.hpp"
#include "bse/verify.hpp"

using namespace bse;

namespace {

// Independent comparison solver for the pure Dirichlet variant
// (w(R1) = 0 = w(R2)): fixed-step RK4 shooting plus bisection. Deliberately
// shares no code with the adaptive oracle.
double dirichlet_mismatch(const RadialProblem& p, double lambda) {
  const int steps = 4000;
  const double h = (p.r_outer - p.r_inner) / steps;
  double w = 0.0, dw = 1.0;
  auto f = [&](double rho, double wv, double dwv, double& k_w, double& k_dw) {
    k_w = dwv;
    k_dw = -(p.dimension - 1) / rho * dwv +
           (static_cast<double>(p.angular_mode) * p.angular_mode / (rho * rho) - lambda) * wv;
  };
  double rho = p.r_inner;
  for (int i = 0; i < steps; ++i) {
    double k1w, k1d, k2w, k2d, k3w, k3d, k4w, k4d;
    f(rho, w, dw, k1w, k1d);
    f(rho + h / 2, w + h / 2 * k1w, dw + h / 2 * k1d, k2w, k2d);
    f(rho + h / 2, w + h / 2 * k2w, dw + h / 2 * k2d, k3w, k3d);
    f(rho + h, w + h * k3w, dw + h * k3d, k4w, k4d);
    w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    dw += h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
    rho += h;
  }
  return w;
}

std::vector<double> dirichlet_eigenvalues(const RadialProblem& p, double lambda_max) {
  std::vector<double> roots;
  const int grid = 600;
  double prev = dirichlet_mismatch(p, lambda_max / grid * 1e-3);
  double prev_lambda = lambda_max / grid * 1e-3;
  for (int j = 1; j <= grid; ++j) {
    const double lambda = lambda_max * j / grid;
    const double value = dirichlet_mismatch(p, lambda);
    if ((prev < 0) != (value < 0)) {
      double lo = prev_lambda, hi = lambda, flo = prev;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dirichlet_mismatch(p, mid);
        if ((flo < 0) != (fm < 0))
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = value;
    prev_lambda = lambda;
  }
  return roots;
}

} // namespace

TEST_CASE("lambda = 0 is not an eigenvalue: the constant solution shoots to 1") {
  for (int dimension : {2, 3, 4}) {
    const RadialProblem p{1.0, 2.0, dimension, 0};
    CHECK(shoot(p, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("sign change brackets an eigenvalue") {
  const RadialProblem p{1.0, 2.0, 2, 0};
  // Ground value sits near 1.06 for this geometry; bracket it coarsely.
  const double f_lo = shoot(p, 0.5);
  const double f_hi = shoot(p, 2.0);
  CHECK(((f_lo < 0) != (f_hi < 0)));

  double lo = 0.5, hi = 2.0, flo = f_lo;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fm = shoot(p, mid);
    if ((flo < 0) != (fm < 0))
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  CHECK(std::abs(shoot(p, 0.5 * (lo + hi))) <= 1e-10);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(shoot({-1.0, 2.0, 2, 0}, 1.0), Error);
  CHECK_THROWS_AS(shoot({2.0, 1.0, 2, 0}, 1.0), Error);
  CHECK_THROWS_AS(shoot({1.0, 2.0, 1, 0}, 1.0), Error);
  CHECK_THROWS_AS(shoot({1.0, 2.0, 3, 1}, 1.0), Error); // m >= 1 needs N = 2
  CHECK_THROWS_AS(find_modes(1.0, 2.0, 2, -1, 10.0), Error);
  CHECK_THROWS_AS(find_modes(1.0, 2.0, 2, 2, -1.0), Error);
}

TEST_CASE("shoot vanishes at the Richardson-extrapolated FEM ground value") {
  // Cross-validation of the two independent routes at the ground eigenvalue.
  std::vector<double> lambda1;
  Mesh mesh = generate_annulus({1.0, 2.0, 8, 32});
  for (int level = 0; level < 3; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    lambda1.push_back(solve_smallest(build_system(mesh), 1, 1e-10).pairs[0].lambda);
  }
  const double r1c = (4.0 * lambda1[1] - lambda1[0]) / 3.0;
  const double r1f = (4.0 * lambda1[2] - lambda1[1]) / 3.0;
  const double extrapolated = (16.0 * r1f - r1c) / 15.0;
  CHECK(std::abs(shoot({1.0, 2.0, 2, 0}, extrapolated)) <= 1e-6);
}

TEST_CASE("find_modes structure") {
  const OracleSpectrum oracle = find_modes(1.0, 2.0, 2, 4, 60.0);
  REQUIRE(!oracle.modes.empty());

  SUBCASE("per-mode lists are strictly increasing") {
    for (int m = 0; m <= 4; ++m) {
      double prev = 0.0;
      for (const auto& mode : oracle.modes) {
        if (mode.m != m) continue;
        CHECK(mode.lambda > prev);
        prev = mode.lambda;
      }
    }
  }

  SUBCASE("multiplicities follow the angular structure") {
    for (const auto& mode : oracle.modes)
      CHECK(mode.multiplicity == (mode.m == 0 ? 1 : 2));
  }

  SUBCASE("merged list is ascending") {
    const auto merged = oracle.lambdas_with_multiplicity();
    for (std::size_t i = 1; i < merged.size(); ++i) CHECK(merged[i] >= merged[i - 1]);
  }

  SUBCASE("profiles satisfy both boundary conditions") {
    for (const auto& mode : oracle.modes) {
      CHECK(mode.w.front() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(mode.w.back()) <= 1e-9);
    }
  }

  SUBCASE("n-th profile of each mode has n-1 interior sign changes") {
    std::vector<int> seen(5, 0);
    for (const auto& mode : oracle.modes) {
      int crossings = 0;
      for (std::size_t i = 2; i + 1 < mode.w.size(); ++i)
        if ((mode.w[i - 1] < 0) != (mode.w[i] < 0)) ++crossings;
      CHECK(crossings == seen[static_cast<std::size_t>(mode.m)]);
      ++seen[static_cast<std::size_t>(mode.m)];
    }
  }

  SUBCASE("ground value is radial and strictly below every m >= 1 value") {
    CHECK(oracle.modes.front().m == 0);
    double min_rest = 1e300;
    for (const auto& mode : oracle.modes)
      if (mode.m >= 1) min_rest = std::min(min_rest, mode.lambda);
    CHECK(oracle.modes.front().lambda < min_rest);
  }
}

TEST_CASE("oracle eigenvalues are stable under integrator tolerance halving") {
  const RadialProblem p{1.0, 2.0, 2, 1};
  for (double guess : {1.9, 12.2}) {
    const auto refine = [&](double tol) {
      double lo = guess * 0.9, hi = guess * 1.1;
      double flo = shoot(p, lo, tol);
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = shoot(p, mid, tol);
        if ((flo < 0) != (fm < 0))
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      return 0.5 * (lo + hi);
    };
    const double full = refine(1e-12);
    const double half = refine(5e-13);
    CHECK(std::abs(full - half) <= 1e-10 * full);
  }
}

TEST_CASE("dynamic eigenvalues lie strictly below their Dirichlet counterparts") {
  // Larger trial space, smaller min-max values; the comparison solver is an
  // independent fixed-step implementation.
  for (int m : {0, 1, 2}) {
    const RadialProblem p{1.0, 2.0, 2, m};
    const OracleSpectrum oracle = find_modes(1.0, 2.0, 2, m, 60.0);
    const std::vector<double> dirichlet = dirichlet_eigenvalues(p, 60.0);
    std::vector<double> dynamic;
    for (const auto& mode : oracle.modes)
      if (mode.m == m) dynamic.push_back(mode.lambda);
    REQUIRE(dynamic.size() >= 2);
    REQUIRE(dirichlet.size() >= 2);
    for (std::size_t i = 0; i < std::min(dynamic.size(), dirichlet.size()); ++i)
      CHECK(dynamic[i] < dirichlet[i]);
  }
}

TEST_CASE("find_modes_auto captures the requested count") {
  const OracleSpectrum oracle = find_modes_auto(1.0, 2.0, 2, 6, 10);
  CHECK(oracle.lambdas_with_multiplicity().size() >= 10);
}

TEST_CASE("threaded scan merges deterministically") {
  const OracleSpectrum serial = find_modes(1.0, 2.0, 2, 3, 40.0, 1);
  const OracleSpectrum threaded = find_modes(1.0, 2.0, 2, 3, 40.0, 4);
  REQUIRE(serial.modes.size() == threaded.modes.size());
  for (std::size_t i = 0; i < serial.modes.size(); ++i) {
    CHECK(serial.modes[i].m == threaded.modes[i].m);
    CHECK(serial.modes[i].lambda == threaded.modes[i].lambda); // bitwise
  }
}

TEST_CASE("ground-mode monotonicity report") {
  const OracleSpectrum oracle = find_modes(1.0, 2.0, 2, 0, 8.0);
  REQUIRE(!oracle.modes.empty());
  const RadialMode& ground = oracle.modes.front();

  SUBCASE("passes on the true profile") {
    const MonotoneReport report = check_monotone(ground, 2);
    CHECK(report.passed);
    CHECK(report.max_dw < 0.0);
    CHECK(report.max_identity_residual <= 1e-9);
  }

  SUBCASE("flags a corrupted profile") {
    RadialMode corrupted = ground;
    for (std::size_t i = corrupted.w.size() / 2; i < corrupted.w.size(); ++i)
      corrupted.w[i] = -corrupted.w[i];
    const MonotoneReport report = check_monotone(corrupted, 2);
    CHECK(!report.passed);
    CHECK(!report.detail.empty());
    CHECK(report.offending_rho > 0.0);
  }

  SUBCASE("rejects non-ground modes") {
    RadialMode excited = ground;
    excited.m = 1;
    CHECK_THROWS_AS(check_monotone(excited, 2), Error);
  }
}

TEST_CASE("profile interpolation matches the grid samples") {
  const OracleSpectrum oracle = find_modes(1.0, 2.0, 2, 0, 8.0);
  const RadialMode& ground = oracle.modes.front();
  for (std::size_t i = 0; i < ground.rho.size(); i += 37)
    CHECK(ground.profile_at(ground.rho[i]) == doctest::Approx(ground.w[i]).epsilon(1e-12));
  // Between nodes the cubic Hermite stays within the profile's range.
  const double mid = 0.5 * (ground.rho[3] + ground.rho[4]);
  const double value = ground.profile_at(mid);
  CHECK(value <= ground.w[3]);
  CHECK(value >= ground.w[4]);
}
