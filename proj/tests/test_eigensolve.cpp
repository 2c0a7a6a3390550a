#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "bse/assembly.hpp"
#include "bse/eigensolve.hpp"
#include "bse/errors.hpp"
#include "bse/mesh.hpp"
#include "bse/rng.hpp"

using namespace bse;

namespace {

SparseSymMatrix diagonal(const std::vector<double>& values) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < static_cast<int>(values.size()); ++i)
    triplets.emplace_back(i, i, values[static_cast<std::size_t>(i)]);
  return SparseSymMatrix::from_triplets(static_cast<int>(values.size()), triplets);
}

DiscreteSystem diagonal_pencil(const std::vector<double>& a, const std::vector<double>& m) {
  DiscreteSystem system;
  system.A = diagonal(a);
  system.M = diagonal(m);
  system.vertex_count = static_cast<int>(a.size());
  for (int i = 0; i < system.vertex_count; ++i) system.free_dofs.push_back(i);
  system.mesh_ref = "diag";
  return system;
}

SparseSymMatrix dense_to_sparse(const Eigen::MatrixXd& D) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < D.rows(); ++i)
    for (int j = 0; j < D.cols(); ++j)
      if (D(i, j) != 0.0) triplets.emplace_back(i, j, D(i, j));
  return SparseSymMatrix::from_triplets(static_cast<int>(D.rows()), triplets);
}

} // namespace

TEST_CASE("factorization solves a diagonal system") {
  const Factorization fact(diagonal({2.0, 3.0}));
  Eigen::VectorXd b(2);
  b << 2.0, 3.0;
  const Eigen::VectorXd x = fact.solve(b);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("factorization residual on a random SPD matrix") {
  SplitMix64 rng(11);
  Eigen::MatrixXd B(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) B(i, j) = rng.symmetric();
  const Eigen::MatrixXd S = B + B.transpose() + 10.0 * Eigen::MatrixXd::Identity(10, 10);
  const SparseSymMatrix A = dense_to_sparse(S);
  const Factorization fact(A);
  Eigen::VectorXd b(10);
  for (int i = 0; i < 10; ++i) b[i] = rng.symmetric();
  const Eigen::VectorXd x = fact.solve(b);
  CHECK((S * x - b).norm() / b.norm() <= 1e-12);
  CHECK(fact.factor_nonzeros() > 0);
}

TEST_CASE("factorization rejects a matrix with a zero row") {
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(4, 4);
  S.row(2).setZero();
  S.col(2).setZero();
  try {
    Factorization fact(dense_to_sparse(S));
    FAIL("expected a definiteness error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numeric);
    CHECK(std::string(e.what()).find("positive definite") != std::string::npos);
  }
}

TEST_CASE("diagonal pencil, identity mass") {
  const DiscreteSystem system = diagonal_pencil({1.0, 4.0}, {1.0, 1.0});

  const Spectrum dense = solve_dense(system);
  REQUIRE(dense.pairs.size() == 2);
  CHECK(dense.pairs[0].lambda == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dense.pairs[1].lambda == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(std::abs(dense.pairs[0].vector[0]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dense.pairs[0].vector[1]) <= 1e-12);
  CHECK(std::abs(dense.pairs[1].vector[1]) == doctest::Approx(1.0).epsilon(1e-12));

  const Spectrum iterative = solve_smallest(system, 1, 1e-12);
  CHECK(iterative.pairs[0].lambda == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("diagonal generalized pencil") {
  const DiscreteSystem system = diagonal_pencil({2.0, 6.0}, {2.0, 2.0});
  const Spectrum dense = solve_dense(system);
  CHECK(dense.pairs[0].lambda == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dense.pairs[1].lambda == doctest::Approx(3.0).epsilon(1e-14));
  // M-normalization: u' M u = 1 with M = 2I means entries are 1/sqrt(2).
  CHECK(std::abs(dense.pairs[0].vector[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));

  const Spectrum iterative = solve_smallest(system, 1, 1e-12);
  CHECK(iterative.pairs[0].lambda == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("solver input validation") {
  const DiscreteSystem system = diagonal_pencil({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  CHECK_THROWS_AS(solve_smallest(system, 0, 1e-10), Error);
  CHECK_THROWS_AS(solve_smallest(system, 3, 1e-10), Error); // k must be <= dim-1
  CHECK_THROWS_AS(solve_smallest(system, 1, 0.0), Error);
}

TEST_CASE("unreachable tolerance ends in a non-convergence diagnostic") {
  const DiscreteSystem system = build_system(generate_annulus({1.0, 2.0, 2, 8}));
  try {
    solve_smallest(system, 1, 1e-300);
    FAIL("expected non-convergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonConvergence);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("iterative spectrum matches the dense decomposition on the annulus") {
  // Desk-scale cross-check of the two independent solver routes.
  const DiscreteSystem system = build_system(generate_annulus({1.0, 2.0, 16, 64}));
  REQUIRE(system.dimension() == 1024);
  const int k = 10;
  const Spectrum iterative = solve_smallest(system, k, 1e-10);
  const Spectrum dense = solve_dense(system);
  for (int i = 0; i < k; ++i) {
    const double want = dense.pairs[static_cast<std::size_t>(i)].lambda;
    CHECK(std::abs(iterative.pairs[static_cast<std::size_t>(i)].lambda - want) <= 1e-9 * want);
  }
}

TEST_CASE("spectrum contract on the annulus") {
  const DiscreteSystem system = build_system(generate_annulus({1.0, 2.0, 8, 32}));
  const int k = 10;
  const Spectrum spectrum = solve_smallest(system, k, 1e-10);
  REQUIRE(static_cast<int>(spectrum.pairs.size()) == k);

  SUBCASE("eigenvalues are positive and ascending") {
    CHECK(spectrum.pairs[0].lambda > 0.0);
    for (int i = 1; i < k; ++i)
      CHECK(spectrum.pairs[static_cast<std::size_t>(i)].lambda >=
            spectrum.pairs[static_cast<std::size_t>(i - 1)].lambda);
  }

  SUBCASE("pairs are M-orthonormal") {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const double g = spectrum.pairs[static_cast<std::size_t>(i)].vector.dot(
            system.M.apply(spectrum.pairs[static_cast<std::size_t>(j)].vector));
        CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-10);
      }
  }

  SUBCASE("H1-norm identity lambda_n = u_n' A u_n") {
    for (const auto& pair : spectrum.pairs) {
      const double a_norm = pair.vector.dot(system.A.apply(pair.vector));
      CHECK(std::abs(a_norm - pair.lambda) <= 1e-9 * pair.lambda);
    }
  }

  SUBCASE("residuals meet the tolerance") {
    for (const auto& pair : spectrum.pairs) {
      CHECK(pair.residual <= 1e-10);
      CHECK(residual_norm(system, pair) == doctest::Approx(pair.residual).epsilon(1e-6));
    }
  }

  SUBCASE("sign normalization: largest-magnitude entry is positive") {
    for (const auto& pair : spectrum.pairs) {
      int arg = 0;
      pair.vector.cwiseAbs().maxCoeff(&arg);
      CHECK(pair.vector[arg] > 0.0);
    }
  }
}

TEST_CASE("determinism: identical runs produce identical spectra") {
  const DiscreteSystem system = build_system(generate_annulus({1.0, 2.0, 4, 16}));
  const Spectrum a = solve_smallest(system, 5, 1e-10);
  const Spectrum b = solve_smallest(system, 5, 1e-10);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].lambda == b.pairs[i].lambda); // bitwise
    CHECK(a.pairs[i].vector == b.pairs[i].vector);
  }
}

TEST_CASE("eigenvalues decrease monotonically under nested refinement") {
  // Conforming min-max argument; the boundary projection breaks exact
  // nesting, so the inequality carries a 1e-6 relative slack.
  Mesh mesh = generate_annulus({1.0, 2.0, 4, 16});
  const int k = 6;
  std::vector<double> coarse = solve_smallest(build_system(mesh), k, 1e-10).lambdas();
  for (int level = 0; level < 2; ++level) {
    mesh = refine_uniform(mesh);
    const std::vector<double> fine = solve_smallest(build_system(mesh), k, 1e-10).lambdas();
    for (int i = 0; i < k; ++i)
      CHECK(coarse[static_cast<std::size_t>(i)] >=
            fine[static_cast<std::size_t>(i)] * (1.0 - 1e-6));
    coarse = fine;
  }
}

TEST_CASE("rayleigh quotient properties") {
  const DiscreteSystem system = build_system(generate_annulus({1.0, 2.0, 4, 16}));
  const Spectrum spectrum = solve_smallest(system, 4, 1e-10);

  SUBCASE("eigenvector reproduces its eigenvalue") {
    for (const auto& pair : spectrum.pairs)
      CHECK(std::abs(rayleigh_quotient(system, pair.vector) - pair.lambda) <=
            1e-10 * pair.lambda);
  }

  SUBCASE("bounded below by lambda_1") {
    const Spectrum dense = solve_dense(system);
    const double lambda1 = dense.pairs[0].lambda;
    SplitMix64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd v(system.dimension());
      for (int i = 0; i < v.size(); ++i) v[i] = rng.symmetric();
      CHECK(rayleigh_quotient(system, v) >= lambda1 - 1e-10);
    }
  }

  SUBCASE("homogeneity") {
    Eigen::VectorXd v(system.dimension());
    SplitMix64 rng(5);
    for (int i = 0; i < v.size(); ++i) v[i] = rng.symmetric();
    const double q1 = rayleigh_quotient(system, v);
    const double q3 = rayleigh_quotient(system, Eigen::VectorXd(3.0 * v));
    CHECK(std::abs(q1 - q3) <= 1e-14 * std::abs(q1));
  }

  SUBCASE("zero vector is rejected") {
    CHECK_THROWS_AS(rayleigh_quotient(system, Eigen::VectorXd::Zero(system.dimension())), Error);
  }
}

TEST_CASE("residual norm properties") {
  const DiscreteSystem system = diagonal_pencil({1.0, 4.0, 9.0}, {1.0, 1.0, 1.0});

  SUBCASE("exact pair has zero residual") {
    EigenPair pair;
    pair.lambda = 4.0;
    pair.vector = Eigen::VectorXd::Zero(3);
    pair.vector[1] = 1.0;
    CHECK(residual_norm(system, pair) == 0.0);
  }

  SUBCASE("perturbed eigenvector has residual of first order") {
    for (double eps : {1e-6, 1e-8}) {
      EigenPair pair;
      pair.vector = Eigen::VectorXd::Zero(3);
      pair.vector[1] = 1.0;
      pair.vector[0] += eps;
      pair.lambda = rayleigh_quotient(system, pair.vector);
      const double r = residual_norm(system, pair);
      CHECK(r > 0.0);
      CHECK(r <= 10.0 * eps);
    }
  }

  SUBCASE("random vector at its Rayleigh quotient is strictly positive") {
    EigenPair pair;
    pair.vector = Eigen::VectorXd(3);
    pair.vector << 1.0, 2.0, -1.0;
    pair.lambda = rayleigh_quotient(system, pair.vector);
    CHECK(residual_norm(system, pair) > 0.0);
  }

  SUBCASE("zero vector is rejected") {
    EigenPair pair;
    pair.lambda = 1.0;
    pair.vector = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(residual_norm(system, pair), Error);
  }
}

TEST_CASE("dense path refuses oversized systems") {
  const DiscreteSystem system = build_system(generate_annulus({1.0, 2.0, 32, 128}));
  REQUIRE(system.dimension() > 2000);
  CHECK_THROWS_WITH_AS(solve_dense(system), doctest::Contains("2000"), Error);
}
