#include "bse/wave.hpp"

#include <cmath>
#include <string>

#include "bse/errors.hpp"

namespace bse {

WaveState project_initial_data(const DiscreteSystem& system, const Spectrum& spectrum,
                               const Eigen::VectorXd& w0_vertex,
                               const Eigen::VectorXd& w1_vertex) {
  if (spectrum.pairs.empty())
    throw Error(ErrorKind::InvalidArgument, "project_initial_data: empty spectrum");
  if (w0_vertex.size() != system.vertex_count || w1_vertex.size() != system.vertex_count)
    throw Error(ErrorKind::InvalidArgument,
                "project_initial_data: initial data must be vertex fields");

  // Gamma0 vertices are exactly the non-free ones; initial data must vanish
  // there.
  std::vector<char> is_free(static_cast<std::size_t>(system.vertex_count), 0);
  for (int v : system.free_dofs) is_free[static_cast<std::size_t>(v)] = 1;
  for (int v = 0; v < system.vertex_count; ++v) {
    if (is_free[static_cast<std::size_t>(v)]) continue;
    if (w0_vertex[v] != 0.0 || w1_vertex[v] != 0.0)
      throw Error(ErrorKind::InvalidArgument,
                  "project_initial_data: nonzero data on Gamma0 vertex " + std::to_string(v));
  }

  const Eigen::VectorXd w0 = system.restrict_to_free(w0_vertex);
  const Eigen::VectorXd w1 = system.restrict_to_free(w1_vertex);
  const Eigen::VectorXd Mw0 = system.M.apply(w0);
  const Eigen::VectorXd Mw1 = system.M.apply(w1);

  const int k = static_cast<int>(spectrum.pairs.size());
  WaveState state;
  state.cos_coeffs.resize(k);
  state.sin_coeffs.resize(k);
  state.omegas.resize(static_cast<std::size_t>(k));
  state.basis_ref = system.mesh_ref;

  for (int n = 0; n < k; ++n) {
    const auto& pair = spectrum.pairs[static_cast<std::size_t>(n)];
    if (!(pair.lambda > 0.0))
      throw Error(ErrorKind::InvalidArgument, "project_initial_data: non-positive eigenvalue");
    const double omega = std::sqrt(pair.lambda);
    state.omegas[static_cast<std::size_t>(n)] = omega;
    state.cos_coeffs[n] = pair.vector.dot(Mw0);
    state.sin_coeffs[n] = pair.vector.dot(Mw1) / omega;
  }

  // Truncation residual of the displacement projection.
  Eigen::VectorXd recon = Eigen::VectorXd::Zero(system.dimension());
  for (int n = 0; n < k; ++n)
    recon += state.cos_coeffs[n] * spectrum.pairs[static_cast<std::size_t>(n)].vector;
  const Eigen::VectorXd diff = w0 - recon;
  state.truncation_residual = std::sqrt(std::max(diff.dot(system.M.apply(diff)), 0.0));
  return state;
}

WaveSample evaluate(const WaveState& state, const Spectrum& spectrum, double t) {
  const int k = static_cast<int>(state.omegas.size());
  if (k == 0 || spectrum.pairs.size() < static_cast<std::size_t>(k))
    throw Error(ErrorKind::InvalidArgument, "evaluate: state/spectrum size mismatch");

  const int dim = static_cast<int>(spectrum.pairs.front().vector.size());
  WaveSample sample;
  sample.displacement = Eigen::VectorXd::Zero(dim);
  sample.velocity = Eigen::VectorXd::Zero(dim);

  for (int n = 0; n < k; ++n) {
    const double omega = state.omegas[static_cast<std::size_t>(n)];
    const double c = state.cos_coeffs[n];
    const double s = state.sin_coeffs[n];
    const double amp = c * std::cos(omega * t) + s * std::sin(omega * t);
    const double vel = omega * (-c * std::sin(omega * t) + s * std::cos(omega * t));
    sample.displacement += amp * spectrum.pairs[static_cast<std::size_t>(n)].vector;
    sample.velocity += vel * spectrum.pairs[static_cast<std::size_t>(n)].vector;
  }
  return sample;
}

double energy(const DiscreteSystem& system, const Spectrum& spectrum, const WaveState& state,
              double t) {
  const WaveSample sample = evaluate(state, spectrum, t);
  const double kinetic = sample.velocity.dot(system.M.apply(sample.velocity));
  const double potential = sample.displacement.dot(system.A.apply(sample.displacement));
  return 0.5 * (kinetic + potential);
}

} // namespace bse
