#ifndef BSE_EIGENSOLVE_HPP
#define BSE_EIGENSOLVE_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <memory>
#include <vector>

#include "bse/assembly.hpp"

namespace bse {

// Sparse Cholesky factorization (fill-reducing AMD ordering) of an SPD
// matrix. solve() applies the inverse; one refinement pass keeps desk-scale
// residuals near machine precision.
class Factorization {
public:
  explicit Factorization(const SparseSymMatrix& A);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  std::int64_t factor_nonzeros() const;
  int dimension() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd vector; // free-dof coefficients, M-normalized
  double residual = 0.0;  // ||A u - lambda M u||_2 / ||u||_M
};

struct SolverDiagnostics {
  int operator_applications = 0; // A^{-1} M products
  int restarts = 0;
  std::int64_t factor_nonzeros = 0;
  bool dense_path = false;
};

struct Spectrum {
  std::vector<EigenPair> pairs; // ascending by lambda
  int k_requested = 0;
  SolverDiagnostics diagnostics;

  std::vector<double> lambdas() const;
};

// k smallest eigenpairs of A u = lambda M u by shift-invert Lanczos at shift
// zero: M-inner-product recurrences on A^{-1} M with full reorthogonalization
// against both the active basis and locked converged vectors, restarting with
// fresh deflated start vectors until k pairs meet the residual tolerance.
Spectrum solve_smallest(const DiscreteSystem& system, int k, double tol);

// Dense full decomposition via tridiagonalization (dimension <= 2000); the
// brute-force reference path.
Spectrum solve_dense(const DiscreteSystem& system);

double rayleigh_quotient(const DiscreteSystem& system, const Eigen::VectorXd& v);
double residual_norm(const DiscreteSystem& system, const EigenPair& pair);

// Flips sign so the entry of largest magnitude is positive (first such entry
// on exact ties).
void sign_normalize(Eigen::VectorXd& v);

} // namespace bse

#endif
