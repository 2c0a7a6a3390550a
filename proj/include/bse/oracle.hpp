#ifndef BSE_ORACLE_HPP
#define BSE_ORACLE_HPP

#include <string>
#include <vector>

namespace bse {

// Radial reduction of the annulus eigenproblem for one angular mode m:
//   -w'' - ((N-1)/rho) w' + (m^2/rho^2) w = lambda w   on (R1, R2)
//   w'(R1) = (m^2/R1^2 - lambda) w(R1)                 (dynamic end)
//   w(R2)  = 0                                         (pinned end)
// The m >= 1 family is the separation-of-variables extension of the radial
// ground-mode reduction; it is meaningful for N = 2 only.
struct RadialProblem {
  double r_inner = 1.0;
  double r_outer = 2.0;
  int dimension = 2;    // N >= 2
  int angular_mode = 0; // m >= 0
};

struct RadialMode {
  int m = 0;
  double lambda = 0.0;
  int multiplicity = 1; // 1 for m = 0, else 2 (cos/sin pair)
  std::vector<double> rho; // uniform grid on [R1, R2]
  std::vector<double> w;   // profile, normalized w(R1) = 1
  std::vector<double> dw;  // w' at the grid points (integrator output)

  // Cubic Hermite evaluation of the stored profile at arbitrary radius.
  double profile_at(double radius) const;
};

struct OracleSpectrum {
  std::vector<RadialMode> modes; // ascending by lambda, ties by m
  double r_inner = 0.0;
  double r_outer = 0.0;
  int dimension = 2;
  int m_max = 0;
  double lambda_max = 0.0;

  // Eigenvalue list with each mode repeated per its multiplicity, ascending.
  std::vector<double> lambdas_with_multiplicity() const;
};

// Terminal mismatch w(R2) of the initial-value integration from R1 with
// w(R1) = 1. Zeros in lambda are the mode-m eigenvalues. Adaptive embedded
// Runge-Kutta (Dormand-Prince 5(4)), local tolerance 1e-12.
double shoot(const RadialProblem& problem, double lambda, double ode_tol = 1e-12);

// Integrates once more at a converged lambda and samples the profile (and
// its derivative) on a uniform grid.
RadialMode solve_mode_profile(const RadialProblem& problem, double lambda,
                              int grid_points = 513, double ode_tol = 1e-12);

// Scans (0, lambda_max] per mode m = 0..m_max on a Weyl-density grid, halving
// the step until bracket counts stabilize, then bisects each bracket to
// relative width 1e-12. threads > 1 distributes modes; the merge order is
// deterministic regardless.
OracleSpectrum find_modes(double r_inner, double r_outer, int dimension,
                          int m_max, double lambda_max, int threads = 1);

// Doubles lambda_max from a Weyl-based guess until the merged list (with
// multiplicity) carries at least min_values entries.
OracleSpectrum find_modes_auto(double r_inner, double r_outer, int dimension,
                               int m_max, int min_values, int threads = 1);

struct MonotoneReport {
  bool passed = false;
  double max_dw = 0.0;               // largest w' over interior grid points
  double max_identity_residual = 0.0;
  double offending_rho = 0.0;        // set when a check fails
  std::string detail;
};

// Ground-mode checks on a stored profile: w' < 0 at every interior grid
// point, and the integral identity
//   rho^{N-1} w'(rho) + lambda * int_{R1}^{rho} t^{N-1} w dt
//                     + lambda * R1^{N-1} w(R1) = 0
// within 1e-9 (quadrature recomputed from the stored samples, so a corrupted
// profile is caught). R1, R2 are taken from the stored grid.
MonotoneReport check_monotone(const RadialMode& mode, int dimension = 2);

} // namespace bse

#endif
