#include "bse/eigensolve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bse/errors.hpp"
#include "bse/rng.hpp"

namespace bse {

struct Factorization::Impl {
  Eigen::SparseMatrix<double> A; // column-major copy for refinement products
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                       Eigen::AMDOrdering<int>>
      llt;
};

Factorization::Factorization(const SparseSymMatrix& A) : impl_(new Impl) {
  if (A.dimension() == 0)
    throw Error(ErrorKind::InvalidArgument, "factorize: empty matrix");
  impl_->A = A.storage();
  impl_->llt.compute(impl_->A);
  if (impl_->llt.info() != Eigen::Success)
    throw Error(ErrorKind::Numeric,
                "factorize: matrix is not positive definite (non-positive pivot)");
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = impl_->llt.solve(b);
  // One refinement pass keeps the solve residual near machine precision.
  x += impl_->llt.solve(b - impl_->A * x);
  return x;
}

std::int64_t Factorization::factor_nonzeros() const {
  return impl_->llt.matrixL().nestedExpression().nonZeros();
}

int Factorization::dimension() const { return static_cast<int>(impl_->A.rows()); }

std::vector<double> Spectrum::lambdas() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.lambda);
  return out;
}

void sign_normalize(Eigen::VectorXd& v) {
  int arg = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

double rayleigh_quotient(const DiscreteSystem& system, const Eigen::VectorXd& v) {
  if (v.size() != system.dimension())
    throw Error(ErrorKind::InvalidArgument, "rayleigh_quotient: wrong vector length");
  if (v.squaredNorm() == 0.0)
    throw Error(ErrorKind::InvalidArgument, "rayleigh_quotient: zero vector");
  const double num = v.dot(system.A.apply(v));
  const double den = v.dot(system.M.apply(v));
  return num / den;
}

double residual_norm(const DiscreteSystem& system, const EigenPair& pair) {
  if (pair.vector.size() != system.dimension())
    throw Error(ErrorKind::InvalidArgument, "residual_norm: wrong vector length");
  if (pair.vector.squaredNorm() == 0.0)
    throw Error(ErrorKind::InvalidArgument, "residual_norm: zero vector");
  const Eigen::VectorXd r =
      system.A.apply(pair.vector) - pair.lambda * system.M.apply(pair.vector);
  const double m_norm = std::sqrt(pair.vector.dot(system.M.apply(pair.vector)));
  return r.norm() / m_norm;
}

namespace {

struct Basis {
  std::vector<Eigen::VectorXd> q;  // M-orthonormal vectors
  std::vector<Eigen::VectorXd> mq; // cached M q
};

// Two-pass M-orthogonalization of w against a basis (classical
// Gram-Schmidt run twice).
void m_orthogonalize(Eigen::VectorXd& w, const Basis& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < basis.q.size(); ++i)
      w -= w.dot(basis.mq[i]) * basis.q[i];
}

} // namespace

Spectrum solve_smallest(const DiscreteSystem& system, int k, double tol) {
  const int n = system.dimension();
  if (k < 1 || k > n - 1)
    throw Error(ErrorKind::InvalidArgument,
                "solve_smallest: k must satisfy 1 <= k <= dim-1 (k=" + std::to_string(k) +
                    ", dim=" + std::to_string(n) + ")");
  if (!(tol > 0.0))
    throw Error(ErrorKind::InvalidArgument, "solve_smallest: tol must be positive");

  Factorization fact(system.A);
  const auto& M = system.M;

  Spectrum spectrum;
  spectrum.k_requested = k;
  spectrum.diagnostics.factor_nonzeros = fact.factor_nonzeros();

  const int op_cap = 50 * k;
  int ops = 0;

  SplitMix64 rng(kDefaultSeed);

  Basis locked;                 // converged eigenvectors
  std::vector<double> locked_lambda;
  std::vector<double> locked_residual;
  double best_unconverged = std::numeric_limits<double>::infinity();

  auto budget_check = [&] {
    if (ops >= op_cap)
      throw Error(ErrorKind::NonConvergence,
                  "solve_smallest: iteration cap of " + std::to_string(op_cap) +
                      " operator applications reached with " +
                      std::to_string(locked.q.size()) + "/" + std::to_string(k) +
                      " pairs converged (best unconverged residual " +
                      std::to_string(best_unconverged) + ")");
  };

  // One deflated Lanczos sweep; locks the ascending prefix of converged Ritz
  // pairs and returns how many it locked. Locking past an unconverged value
  // is never allowed: a later restart could still produce something smaller.
  auto run_sweep = [&](int needed, int m_cap) -> int {
    Eigen::VectorXd q(n);
    double q_norm = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 100)
        throw Error(ErrorKind::Numeric, "solve_smallest: could not draw a deflated start vector");
      for (int i = 0; i < n; ++i) q[i] = rng.symmetric();
      m_orthogonalize(q, locked);
      q_norm = std::sqrt(std::max(q.dot(M.apply(q)), 0.0));
      if (q_norm > 1e-12) break;
    }
    q /= q_norm;
    Eigen::VectorXd mq = M.apply(q);

    Basis krylov;
    std::vector<double> alpha, beta;

    for (int j = 0; j < m_cap && ops < op_cap; ++j) {
      krylov.q.push_back(q);
      krylov.mq.push_back(mq);

      Eigen::VectorXd w = fact.solve(mq);
      ++ops;
      ++spectrum.diagnostics.operator_applications;

      if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * krylov.q[static_cast<std::size_t>(j - 1)];
      const double a = w.dot(mq);
      alpha.push_back(a);
      w -= a * q;

      m_orthogonalize(w, locked);
      m_orthogonalize(w, krylov);

      Eigen::VectorXd mw = M.apply(w);
      const double b = std::sqrt(std::max(w.dot(mw), 0.0));

      double scale = 0.0;
      for (double v : alpha) scale = std::max(scale, std::abs(v));
      for (double v : beta) scale = std::max(scale, std::abs(v));
      if (b <= 1e-14 * std::max(scale, 1e-300)) break; // invariant subspace exhausted

      beta.push_back(b);
      q = w / b;
      mq = mw / b;

      // Cheap convergence probe on the tridiagonal Ritz pairs.
      const int m = static_cast<int>(alpha.size());
      if (m >= needed + 1) {
        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub);
        int ready = 0;
        for (int i = m - 1; i >= 0 && ready < needed; --i) { // largest theta first
          const double theta = es.eigenvalues()[i];
          if (theta <= 0.0) break;
          const double bound = b * std::abs(es.eigenvectors()(m - 1, i));
          if (bound <= 0.01 * tol * theta)
            ++ready;
          else
            break;
        }
        if (ready >= needed) break;
      }
    }

    if (alpha.empty()) return 0;

    // Rayleigh-Ritz extraction from the tridiagonal matrix.
    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub =
        m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
              : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    if (es.info() != Eigen::Success)
      throw Error(ErrorKind::Numeric, "solve_smallest: tridiagonal eigensolve failed");

    int locked_this_sweep = 0;
    for (int i = m - 1; i >= 0; --i) { // theta descending = lambda ascending
      if (locked_this_sweep >= needed) break;
      const double theta = es.eigenvalues()[i];
      if (theta <= 0.0) break;

      Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < m; ++j) u += es.eigenvectors()(j, i) * krylov.q[static_cast<std::size_t>(j)];
      m_orthogonalize(u, locked);
      const double norm = std::sqrt(std::max(u.dot(M.apply(u)), 0.0));
      if (norm <= 1e-12) continue; // direction already locked
      u /= norm;

      const Eigen::VectorXd Au = system.A.apply(u);
      const Eigen::VectorXd Mu = M.apply(u);
      const double lambda = u.dot(Au);
      const double residual = (Au - lambda * Mu).norm();

      if (residual <= tol) {
        locked.q.push_back(u);
        locked.mq.push_back(Mu);
        locked_lambda.push_back(lambda);
        locked_residual.push_back(residual);
        ++locked_this_sweep;
      } else {
        best_unconverged = residual;
        break;
      }
    }
    return locked_this_sweep;
  };

  // Fill phase: lock k pairs.
  int sweep_cap = std::min(n, std::max(2 * k + 20, 30));
  bool first_sweep = true;
  while (static_cast<int>(locked.q.size()) < k) {
    budget_check();
    if (!first_sweep) ++spectrum.diagnostics.restarts;
    first_sweep = false;
    const int needed = k - static_cast<int>(locked.q.size());
    if (run_sweep(needed, std::min(n - static_cast<int>(locked.q.size()), sweep_cap)) == 0)
      sweep_cap = std::min(n, sweep_cap * 2);
  }

  // Confirmation phase: a single start vector sees one direction per
  // eigenspace, so a sweep can walk past the second copy of a degenerate
  // cluster. Probe the deflated operator until its smallest eigenvalue is
  // confirmed to lie at or above the current k-th value.
  int probe_cap = std::min(n, 30);
  while (static_cast<int>(locked.q.size()) < n) {
    std::vector<double> sorted = locked_lambda;
    std::sort(sorted.begin(), sorted.end());
    const double kth = sorted[static_cast<std::size_t>(k - 1)];

    budget_check();
    ++spectrum.diagnostics.restarts;
    const std::size_t before = locked.q.size();
    run_sweep(1, std::min(n - static_cast<int>(locked.q.size()), probe_cap));
    if (locked.q.size() == before) {
      probe_cap = std::min(n, probe_cap * 2);
      continue;
    }
    double newly = std::numeric_limits<double>::infinity();
    for (std::size_t i = before; i < locked.q.size(); ++i)
      newly = std::min(newly, locked_lambda[i]);
    if (newly >= kth * (1.0 - 1e-10)) break; // nothing smaller was missing
  }

  // Inverse-iteration polish with deflation; keep the better of old/new.
  for (std::size_t i = 0; i < locked.q.size(); ++i) {
    Eigen::VectorXd u = fact.solve(locked.mq[i]);
    ++spectrum.diagnostics.operator_applications;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < locked.q.size(); ++j) {
        if (j == i) continue;
        u -= u.dot(locked.mq[j]) * locked.q[j];
      }
    const double norm = std::sqrt(std::max(u.dot(M.apply(u)), 0.0));
    if (norm <= 1e-12) continue;
    u /= norm;
    const Eigen::VectorXd Au = system.A.apply(u);
    const Eigen::VectorXd Mu = M.apply(u);
    const double lambda = u.dot(Au);
    const double residual = (Au - lambda * Mu).norm();
    if (residual < locked_residual[i]) {
      locked.q[i] = u;
      locked.mq[i] = Mu;
      locked_lambda[i] = lambda;
      locked_residual[i] = residual;
    }
  }

  std::vector<int> order(locked.q.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return locked_lambda[static_cast<std::size_t>(a)] < locked_lambda[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(k)); // confirmation may lock extras

  for (int idx : order) {
    EigenPair pair;
    pair.lambda = locked_lambda[static_cast<std::size_t>(idx)];
    pair.vector = locked.q[static_cast<std::size_t>(idx)];
    sign_normalize(pair.vector);
    pair.residual = locked_residual[static_cast<std::size_t>(idx)];
    if (!(pair.lambda > 0.0))
      throw Error(ErrorKind::Numeric,
                  "solve_smallest: non-positive eigenvalue (broken assembly?)");
    spectrum.pairs.push_back(std::move(pair));
  }
  return spectrum;
}

Spectrum solve_dense(const DiscreteSystem& system) {
  const int n = system.dimension();
  if (n > 2000)
    throw Error(ErrorKind::InvalidArgument,
                "solve_dense: dimension " + std::to_string(n) + " exceeds the dense cap of 2000");

  const Eigen::MatrixXd A = Eigen::MatrixXd(system.A.storage());
  const Eigen::MatrixXd M = Eigen::MatrixXd(system.M.storage());

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      A, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::Numeric, "solve_dense: decomposition failed");

  Spectrum spectrum;
  spectrum.k_requested = n;
  spectrum.diagnostics.dense_path = true;
  spectrum.pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    EigenPair pair;
    pair.lambda = es.eigenvalues()[i];
    pair.vector = es.eigenvectors().col(i);
    sign_normalize(pair.vector);
    pair.residual = residual_norm(system, pair);
    spectrum.pairs.push_back(std::move(pair));
  }
  return spectrum;
}

} // namespace bse
