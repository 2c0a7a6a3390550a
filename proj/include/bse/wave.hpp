#ifndef BSE_WAVE_HPP
#define BSE_WAVE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bse/assembly.hpp"
#include "bse/eigensolve.hpp"

namespace bse {

// Solution of the evolution problem in the discrete eigenbasis: displacement
//   d(t) = sum_n (c_n cos(w_n t) + s_n sin(w_n t)) u_n,   w_n = sqrt(lambda_n).
// Synthesis is exact in t; there is no time stepping.
struct WaveState {
  Eigen::VectorXd cos_coeffs;
  Eigen::VectorXd sin_coeffs;
  std::vector<double> omegas; // ascending, strictly positive
  double time = 0.0;
  std::string basis_ref; // mesh_ref of the spectrum the basis came from
  double truncation_residual = 0.0; // ||w0 - sum c_n u_n||_M
};

// M-projection of initial displacement/velocity (vertex fields, zero on
// Gamma0) onto the first k modes: c_n = u_n^T M w0, s_n = (u_n^T M w1)/w_n.
WaveState project_initial_data(const DiscreteSystem& system,
                               const Spectrum& spectrum,
                               const Eigen::VectorXd& w0_vertex,
                               const Eigen::VectorXd& w1_vertex);

struct WaveSample {
  Eigen::VectorXd displacement; // free-dof vector
  Eigen::VectorXd velocity;     // exact time derivative
};

WaveSample evaluate(const WaveState& state, const Spectrum& spectrum, double t);

// Discrete energy E(t) = (v^T M v + d^T A d) / 2 from the synthesized state.
double energy(const DiscreteSystem& system, const Spectrum& spectrum,
              const WaveState& state, double t);

} // namespace bse

#endif
