#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cstring>

#include "oracles.hpp"
#include "szsc/matrix_core.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("ridge_solve: identity system returns the targets") {
  const MatrixXd a = MatrixXd::Identity(3, 3);
  MatrixXd b(3, 2);
  b << 1, 4, 2, 5, 3, 6;
  const MatrixXd s = szsc::ridge_solve(a, b, 0.0);
  CHECK((s - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ridge_solve: huge ridge weight shrinks everything to zero") {
  const MatrixXd a = MatrixXd::Identity(3, 3);
  MatrixXd b(3, 1);
  b << 1, 2, 3;
  const MatrixXd s = szsc::ridge_solve(a, b, 1e12);
  CHECK(s.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("ridge_solve: agrees with a gradient-descent oracle") {
  szsc::Rng rng(42);
  const MatrixXd a = oracle::random_matrix(8, 5, rng);
  const MatrixXd b = oracle::random_matrix(8, 2, rng);
  const MatrixXd s = szsc::ridge_solve(a, b, 0.5);
  const MatrixXd ref = oracle::ridge_gradient_descent(a, b, 0.5);
  CHECK((s - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ridge_solve: solution zeroes the gradient on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    szsc::Rng rng(seed);
    const auto m = 4 + rng.uniform_int(8);
    const auto k = 1 + rng.uniform_int(static_cast<int>(m));
    const auto n = 1 + rng.uniform_int(4);
    const MatrixXd a = oracle::random_matrix(m, k, rng);
    const MatrixXd b = oracle::random_matrix(m, n, rng);
    const double gamma = seed % 3 == 0 ? 0.0 : rng.uniform(0.0, 2.0);
    const MatrixXd s = szsc::ridge_solve(a, b, gamma);
    const MatrixXd grad = gamma * s + a.transpose() * (a * s - b);
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("ridge_solve: input and numerical errors") {
  const MatrixXd a = MatrixXd::Ones(3, 2);
  const MatrixXd b = MatrixXd::Ones(4, 1);
  CHECK_THROWS_AS((void)szsc::ridge_solve(a, b, 0.0), szsc::InputError);
  CHECK_THROWS_AS((void)szsc::ridge_solve(a, MatrixXd::Ones(3, 1), -1.0), szsc::InputError);

  MatrixXd sing(2, 2);  // second column identically zero -> singular normal matrix
  sing << 1, 0, 0, 0;
  MatrixXd rhs(2, 1);
  rhs << 1, 1;
  szsc::SolverSettings no_jitter;
  no_jitter.jitter = 0.0;
  CHECK_THROWS_AS((void)szsc::ridge_solve(sing, rhs, 0.0, no_jitter), szsc::NumericalError);
  // default jitter resolves the same system
  const MatrixXd s = szsc::ridge_solve(sing, rhs, 0.0);
  CHECK(s.allFinite());
}

TEST_CASE("ridge_solve: deterministic") {
  szsc::Rng rng(7);
  const MatrixXd a = oracle::random_matrix(6, 4, rng);
  const MatrixXd b = oracle::random_matrix(6, 3, rng);
  const MatrixXd s1 = szsc::ridge_solve(a, b, 0.3);
  const MatrixXd s2 = szsc::ridge_solve(a, b, 0.3);
  CHECK(std::memcmp(s1.data(), s2.data(), sizeof(double) * s1.size()) == 0);
}

TEST_CASE("constrained_dict_solve: inactive constraints reduce to least squares") {
  szsc::Rng rng(3);
  MatrixXd d_true = oracle::random_matrix(5, 3, rng);
  for (Eigen::Index i = 0; i < d_true.cols(); ++i) d_true.col(i) *= 0.3 / d_true.col(i).norm();
  const MatrixXd c = oracle::random_matrix(3, 9, rng);
  const MatrixXd y = d_true * c;
  const MatrixXd d = szsc::constrained_dict_solve(y, c);
  CHECK((d - d_true).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("constrained_dict_solve: scalar clipping") {
  MatrixXd y(1, 1), c(1, 1);
  y << 4;
  c << 1;
  const MatrixXd d = szsc::constrained_dict_solve(y, c);
  CHECK(d(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("constrained_dict_solve: matches the projected-gradient oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    szsc::Rng rng(seed * 11 + 1);
    const MatrixXd y = oracle::random_matrix(10, 6, rng, -2.0, 2.0);
    const MatrixXd c = oracle::random_matrix(4, 6, rng);
    const MatrixXd d = szsc::constrained_dict_solve(y, c);
    const MatrixXd ref = oracle::dict_projected_gradient(y, c);
    const double f_d = oracle::dict_objective(y, c, d);
    const double f_ref = oracle::dict_objective(y, c, ref);
    CHECK(f_d <= f_ref + 1e-6 * (1.0 + std::abs(f_ref)));
    for (Eigen::Index i = 0; i < d.cols(); ++i) {
      CHECK(d.col(i).squaredNorm() <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("constrained_dict_solve: complementary slackness at active constraints") {
  szsc::Rng rng(19);
  const MatrixXd y = oracle::random_matrix(6, 12, rng, -4.0, 4.0);  // large targets force activity
  const MatrixXd c = oracle::random_matrix(4, 12, rng);
  const MatrixXd d = szsc::constrained_dict_solve(y, c);
  // recover the dual diagonal from the normal equations and check the pairing
  const MatrixXd gram = c * c.transpose();
  const MatrixXd p = y * c.transpose();
  bool any_active = false;
  for (Eigen::Index i = 0; i < d.cols(); ++i) {
    const double sq = d.col(i).squaredNorm();
    CHECK(sq <= 1.0 + 1e-9);
    const VectorXd residual = p.col(i) - d * gram.col(i);  // equals lambda_i * d_i
    const double lam = sq > 0 ? residual.dot(d.col(i)) / sq : 0.0;
    if (lam > 1e-8) {
      any_active = true;
      CHECK(std::abs(sq - 1.0) < 1e-6);
    }
  }
  CHECK(any_active);
}

TEST_CASE("constrained_dict_solve: zero target gives a zero dictionary") {
  szsc::Rng rng(5);
  const MatrixXd c = oracle::random_matrix(3, 7, rng);
  const MatrixXd d = szsc::constrained_dict_solve(MatrixXd::Zero(4, 7), c);
  CHECK(d.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constrained_dict_solve: dimension mismatch") {
  CHECK_THROWS_AS((void)szsc::constrained_dict_solve(MatrixXd::Ones(2, 3), MatrixXd::Ones(2, 4)),
                  szsc::InputError);
}

TEST_CASE("constrained_dict_solve: deterministic") {
  szsc::Rng rng(23);
  const MatrixXd y = oracle::random_matrix(7, 5, rng, -3.0, 3.0);
  const MatrixXd c = oracle::random_matrix(3, 5, rng);
  const MatrixXd d1 = szsc::constrained_dict_solve(y, c);
  const MatrixXd d2 = szsc::constrained_dict_solve(y, c);
  CHECK(std::memcmp(d1.data(), d2.data(), sizeof(double) * d1.size()) == 0);
}

TEST_CASE("cosine_sim: fixtures and the zero-vector rule") {
  VectorXd a(3), b(3);
  a << 1, 2, 3;
  CHECK(szsc::cosine_sim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  VectorXd e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  CHECK(szsc::cosine_sim(e1, e2) == 0.0);

  VectorXd p(2), q(2);
  p << 1, 1;
  q << 1, -1;
  CHECK(szsc::cosine_sim(p, q) == 0.0);

  const VectorXd zero = VectorXd::Zero(3);
  b << 4, 5, 6;
  CHECK(szsc::cosine_sim(zero, b) == 0.0);

  VectorXd short_vec(2);
  short_vec << 1, 2;
  CHECK_THROWS_AS((void)szsc::cosine_sim(a, short_vec), szsc::InputError);
}
