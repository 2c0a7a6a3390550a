#include "bse/oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "bse/errors.hpp"

namespace bse {

namespace {

void validate_problem(const RadialProblem& p) {
  if (!(p.r_inner > 0.0))
    throw Error(ErrorKind::InvalidArgument, "radial problem: r_inner must be positive");
  if (!(p.r_inner < p.r_outer))
    throw Error(ErrorKind::InvalidArgument, "radial problem: r_inner must be smaller than r_outer");
  if (p.dimension < 2)
    throw Error(ErrorKind::InvalidArgument, "radial problem: dimension must be at least 2");
  if (p.angular_mode < 0)
    throw Error(ErrorKind::InvalidArgument, "radial problem: angular mode must be nonnegative");
  if (p.angular_mode > 0 && p.dimension != 2)
    throw Error(ErrorKind::InvalidArgument,
                "radial problem: angular modes m >= 1 are defined for dimension 2 only");
}

using State = std::array<double, 3>; // (w, w', q) with q' = rho^{N-1} w

// State derivative of the mode-m radial reduction; the third component
// accumulates the weighted integral used by the monotonicity identity.
struct RadialRhs {
  int dimension;
  int m;
  double lambda;

  State operator()(double rho, const State& y) const {
    const double w = y[0];
    const double dw = y[1];
    State dy;
    dy[0] = dw;
    dy[1] = -(dimension - 1) / rho * dw + (static_cast<double>(m) * m / (rho * rho) - lambda) * w;
    dy[2] = std::pow(rho, dimension - 1) * w;
    return dy;
  }
};

// Dormand-Prince 5(4) step: returns the 5th-order solution and the embedded
// error estimate; k1 supports FSAL reuse.
struct Dopri5 {
  RadialRhs rhs;

  State step(double rho, const State& y, double h, const State& k1, State& k7,
             State& error) const {
    auto axpy = [](const State& y0, std::initializer_list<std::pair<double, const State*>> terms,
                   double h) {
      State out = y0;
      for (const auto& [coeff, k] : terms)
        for (int i = 0; i < 3; ++i) out[i] += h * coeff * (*k)[i];
      return out;
    };

    const State k2 = rhs(rho + h / 5.0, axpy(y, {{1.0 / 5.0, &k1}}, h));
    const State k3 = rhs(rho + 3.0 * h / 10.0, axpy(y, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}, h));
    const State k4 = rhs(rho + 4.0 * h / 5.0,
                         axpy(y, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}, h));
    const State k5 =
        rhs(rho + 8.0 * h / 9.0, axpy(y,
                                      {{19372.0 / 6561.0, &k1},
                                       {-25360.0 / 2187.0, &k2},
                                       {64448.0 / 6561.0, &k3},
                                       {-212.0 / 729.0, &k4}},
                                      h));
    const State k6 = rhs(rho + h, axpy(y,
                                       {{9017.0 / 3168.0, &k1},
                                        {-355.0 / 33.0, &k2},
                                        {46732.0 / 5247.0, &k3},
                                        {49.0 / 176.0, &k4},
                                        {-5103.0 / 18656.0, &k5}},
                                       h));
    const State y5 = axpy(y,
                          {{35.0 / 384.0, &k1},
                           {500.0 / 1113.0, &k3},
                           {125.0 / 192.0, &k4},
                           {-2187.0 / 6784.0, &k5},
                           {11.0 / 84.0, &k6}},
                          h);
    k7 = rhs(rho + h, y5);

    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    for (int i = 0; i < 3; ++i)
      error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    return y5;
  }
};

// Integrates from rho0 to rho1, optionally recording the state at the given
// sample abscissae (which must be increasing and inside [rho0, rho1]; steps
// are capped to land exactly on them).
State integrate(const RadialRhs& rhs, double rho0, double rho1, State y, double tol,
                const std::vector<double>* samples = nullptr,
                std::vector<State>* recorded = nullptr) {
  const Dopri5 stepper{rhs};
  const double span = rho1 - rho0;

  double rho = rho0;
  double h = span / 100.0;
  State k1 = rhs(rho, y);

  std::size_t next_sample = 0;
  if (samples && recorded) {
    while (next_sample < samples->size() && (*samples)[next_sample] <= rho0) {
      recorded->push_back(y);
      ++next_sample;
    }
  }

  while (rho < rho1) {
    bool capped = false;
    double target = rho1;
    if (samples && next_sample < samples->size())
      target = std::min(target, (*samples)[next_sample]);
    if (rho + h >= target) {
      h = target - rho;
      capped = true;
    }
    if (h <= 1e-14 * span)
      throw Error(ErrorKind::Numeric, "radial integrator: step size collapsed at rho = " +
                                          std::to_string(rho));

    State k7, err;
    const State y_new = stepper.step(rho, y, h, k1, k7, err);

    double err_norm = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double scale = tol + tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_norm += (err[i] / scale) * (err[i] / scale);
    }
    err_norm = std::sqrt(err_norm / 3.0);

    if (err_norm <= 1.0) {
      rho += h;
      y = y_new;
      k1 = k7; // FSAL
      if (capped && samples && next_sample < samples->size() &&
          rho >= (*samples)[next_sample]) {
        if (recorded) recorded->push_back(y);
        ++next_sample;
      }
    }

    const double factor =
        err_norm > 0.0 ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0) : 5.0;
    h *= factor;
  }
  return y;
}

State initial_state(const RadialProblem& p, double lambda) {
  const double m2 = static_cast<double>(p.angular_mode) * p.angular_mode;
  // w(R1) = 1; the dynamic condition fixes w'(R1) = m^2/R1^2 - lambda.
  return {1.0, m2 / (p.r_inner * p.r_inner) - lambda, 0.0};
}

} // namespace

double shoot(const RadialProblem& problem, double lambda, double ode_tol) {
  validate_problem(problem);
  const RadialRhs rhs{problem.dimension, problem.angular_mode, lambda};
  const State end =
      integrate(rhs, problem.r_inner, problem.r_outer, initial_state(problem, lambda), ode_tol);
  return end[0];
}

RadialMode solve_mode_profile(const RadialProblem& problem, double lambda, int grid_points,
                              double ode_tol) {
  validate_problem(problem);
  if (grid_points < 3)
    throw Error(ErrorKind::InvalidArgument, "solve_mode_profile: need at least 3 grid points");

  RadialMode mode;
  mode.m = problem.angular_mode;
  mode.lambda = lambda;
  mode.multiplicity = problem.angular_mode == 0 ? 1 : 2;

  mode.rho.resize(static_cast<std::size_t>(grid_points));
  const double h = (problem.r_outer - problem.r_inner) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) mode.rho[static_cast<std::size_t>(i)] = problem.r_inner + i * h;
  mode.rho.back() = problem.r_outer;

  const RadialRhs rhs{problem.dimension, problem.angular_mode, lambda};
  std::vector<State> recorded;
  recorded.reserve(mode.rho.size());
  integrate(rhs, problem.r_inner, problem.r_outer, initial_state(problem, lambda), ode_tol,
            &mode.rho, &recorded);
  if (recorded.size() != mode.rho.size())
    throw Error(ErrorKind::Numeric, "solve_mode_profile: sampling failed");

  mode.w.resize(recorded.size());
  mode.dw.resize(recorded.size());
  for (std::size_t i = 0; i < recorded.size(); ++i) {
    mode.w[i] = recorded[i][0];
    mode.dw[i] = recorded[i][1];
  }
  return mode;
}

double RadialMode::profile_at(double radius) const {
  if (rho.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "profile_at: profile grid is empty");
  const double r0 = rho.front();
  const double r1 = rho.back();
  if (radius < r0 - 1e-12 * (r1 - r0) || radius > r1 + 1e-12 * (r1 - r0))
    throw Error(ErrorKind::InvalidArgument, "profile_at: radius outside the profile range");

  const double h = (r1 - r0) / static_cast<double>(rho.size() - 1);
  int cell = static_cast<int>((radius - r0) / h);
  cell = std::clamp(cell, 0, static_cast<int>(rho.size()) - 2);

  const double t = (radius - rho[static_cast<std::size_t>(cell)]) / h;
  const double w0 = w[static_cast<std::size_t>(cell)], w1 = w[static_cast<std::size_t>(cell) + 1];
  const double d0 = dw[static_cast<std::size_t>(cell)], d1 = dw[static_cast<std::size_t>(cell) + 1];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * w0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * w1 + (t3 - t2) * h * d1;
}

std::vector<double> OracleSpectrum::lambdas_with_multiplicity() const {
  std::vector<double> out;
  for (const auto& mode : modes)
    for (int c = 0; c < mode.multiplicity; ++c) out.push_back(mode.lambda);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double bisect_root(const RadialProblem& p, double lo, double hi, double f_lo) {
  // Relative width 1e-12 on the eigenvalue.
  while (hi - lo > 1e-12 * std::max(hi, 1.0)) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = shoot(p, mid);
    if (f_mid == 0.0) return mid;
    if ((f_lo < 0.0) != (f_mid < 0.0)) {
      hi = mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Bracket {
  double lo, hi, f_lo;
};

std::vector<Bracket> scan_brackets(const RadialProblem& p, double lambda_max, int grid) {
  std::vector<Bracket> brackets;
  double prev_lambda = 0.0;
  double prev_f = shoot(p, 0.0);
  for (int j = 1; j <= grid; ++j) {
    const double lambda = lambda_max * j / grid;
    const double f = shoot(p, lambda);
    if ((prev_f < 0.0) != (f < 0.0)) brackets.push_back({prev_lambda, lambda, prev_f});
    prev_lambda = lambda;
    prev_f = f;
  }
  return brackets;
}

std::vector<double> mode_eigenvalues(const RadialProblem& p, double lambda_max) {
  // Weyl-type density guess: eigenvalues of the radial reduction behave like
  // (n pi / (R2 - R1))^2 for large n, so sqrt(lambda_max) (R2-R1)/pi of them
  // fit below lambda_max.
  const int expected =
      static_cast<int>(std::sqrt(lambda_max) * (p.r_outer - p.r_inner) / M_PI) + 2;
  int grid = std::max(200, 8 * expected);

  std::vector<Bracket> brackets = scan_brackets(p, lambda_max, grid);
  const int max_halvings = 12;
  for (int halving = 0;; ++halving) {
    if (halving == max_halvings)
      throw Error(ErrorKind::Numeric,
                  "find_modes: bracket count did not stabilize for angular mode " +
                      std::to_string(p.angular_mode) + " (roots closer than the finest scan grid)");
    grid *= 2;
    std::vector<Bracket> finer = scan_brackets(p, lambda_max, grid);
    if (finer.size() == brackets.size()) {
      brackets = std::move(finer);
      break;
    }
    brackets = std::move(finer);
  }

  std::vector<double> roots;
  roots.reserve(brackets.size());
  for (const auto& b : brackets) roots.push_back(bisect_root(p, b.lo, b.hi, b.f_lo));
  return roots;
}

} // namespace

OracleSpectrum find_modes(double r_inner, double r_outer, int dimension, int m_max,
                          double lambda_max, int threads) {
  if (m_max < 0)
    throw Error(ErrorKind::InvalidArgument, "find_modes: m_max must be nonnegative");
  if (!(lambda_max > 0.0))
    throw Error(ErrorKind::InvalidArgument, "find_modes: lambda_max must be positive");

  std::vector<RadialProblem> problems;
  for (int m = 0; m <= m_max; ++m) problems.push_back({r_inner, r_outer, dimension, m});
  for (const auto& p : problems) validate_problem(p);

  std::vector<std::vector<double>> roots_per_mode(problems.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < problems.size(); ++i)
      roots_per_mode[i] = mode_eigenvalues(problems[i], lambda_max);
  } else {
    // Independent per-mode scans; the merge below fixes the ordering.
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = cursor.fetch_add(1); i < problems.size(); i = cursor.fetch_add(1)) {
          try {
            roots_per_mode[i] = mode_eigenvalues(problems[i], lambda_max);
          } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  OracleSpectrum oracle;
  oracle.r_inner = r_inner;
  oracle.r_outer = r_outer;
  oracle.dimension = dimension;
  oracle.m_max = m_max;
  oracle.lambda_max = lambda_max;

  for (std::size_t i = 0; i < problems.size(); ++i)
    for (double lambda : roots_per_mode[i])
      oracle.modes.push_back(solve_mode_profile(problems[i], lambda));

  std::sort(oracle.modes.begin(), oracle.modes.end(), [](const RadialMode& a, const RadialMode& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.m < b.m;
  });
  return oracle;
}

OracleSpectrum find_modes_auto(double r_inner, double r_outer, int dimension, int m_max,
                               int min_values, int threads) {
  if (min_values < 1)
    throw Error(ErrorKind::InvalidArgument, "find_modes_auto: min_values must be positive");
  const double base = M_PI / (r_outer - r_inner);
  double lambda_max = 4.0 * base * base;
  for (int attempt = 0; attempt < 16; ++attempt) {
    OracleSpectrum oracle = find_modes(r_inner, r_outer, dimension, m_max, lambda_max, threads);
    if (static_cast<int>(oracle.lambdas_with_multiplicity().size()) >= min_values) return oracle;
    lambda_max *= 2.0;
  }
  throw Error(ErrorKind::Numeric, "find_modes_auto: could not capture the requested mode count");
}

MonotoneReport check_monotone(const RadialMode& mode, int dimension) {
  if (mode.m != 0)
    throw Error(ErrorKind::InvalidArgument, "check_monotone: requires the m = 0 ground mode");
  const std::size_t n = mode.rho.size();
  if (n < 3 || mode.w.size() != n || mode.dw.size() != n)
    throw Error(ErrorKind::InvalidArgument, "check_monotone: malformed profile");

  MonotoneReport report;
  report.passed = true;
  report.max_dw = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 1; i + 1 < n; ++i) {
    report.max_dw = std::max(report.max_dw, mode.dw[i]);
    if (!(mode.dw[i] < 0.0)) {
      report.passed = false;
      report.offending_rho = mode.rho[i];
      report.detail = "w' is not strictly negative at rho = " + std::to_string(mode.rho[i]);
      return report;
    }
  }

  // Identity: rho^{N-1} w' + lambda \int_{R1}^{rho} t^{N-1} w dt
  //           + lambda R1^{N-1} w(R1) = 0.
  // Cumulative corrected-trapezoid quadrature (exact for the cubic Hermite
  // interpolant) from the stored samples and derivatives.
  const double r1 = mode.rho.front();
  const double nm1 = dimension - 1;
  auto f = [&](std::size_t i) { return std::pow(mode.rho[i], nm1) * mode.w[i]; };
  auto df = [&](std::size_t i) {
    const double rho = mode.rho[i];
    return nm1 * std::pow(rho, nm1 - 1.0) * mode.w[i] + std::pow(rho, nm1) * mode.dw[i];
  };

  const double bc_term = mode.lambda * std::pow(r1, nm1) * mode.w.front();
  double integral = 0.0;
  const double tol = 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const double h = mode.rho[i] - mode.rho[i - 1];
      integral += 0.5 * h * (f(i - 1) + f(i)) + h * h / 12.0 * (df(i - 1) - df(i));
    }
    const double residual =
        std::pow(mode.rho[i], nm1) * mode.dw[i] + mode.lambda * integral + bc_term;
    report.max_identity_residual = std::max(report.max_identity_residual, std::abs(residual));
    if (std::abs(residual) > tol) {
      report.passed = false;
      report.offending_rho = mode.rho[i];
      report.detail = "integral identity residual " + std::to_string(std::abs(residual)) +
                      " exceeds " + std::to_string(tol) + " at rho = " + std::to_string(mode.rho[i]);
      return report;
    }
  }

  report.detail = "w' < 0 on the interior; identity residual <= " +
                  std::to_string(report.max_identity_residual);
  return report;
}

} // namespace bse
