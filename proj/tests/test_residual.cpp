#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "planted.hpp"
#include "szsc/residual.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Orthonormal columns via a thin QR of a random matrix.
MatrixXd orthonormal(Eigen::Index rows, Eigen::Index cols, szsc::Rng& rng) {
  const MatrixXd a = oracle::random_matrix(rows, cols, rng);
  return Eigen::HouseholderQR<MatrixXd>(a).householderQ() * MatrixXd::Identity(rows, cols);
}

struct Parts {
  szsc::LadModel lad;
  MatrixXd x_s, h;
  MatrixXd residual_dict, residual_classifier, latent_predictor;
};

Parts random_parts(std::uint64_t seed, int k_o = 12, int k_l = 4, int k_r = 3, int c_s = 3,
                   int n = 15) {
  szsc::Rng rng(seed);
  Parts p;
  p.lad.feature_dict = oracle::random_matrix(k_o, k_l, rng);
  p.lad.latent_codes = oracle::random_matrix(k_l, n, rng);
  p.lad.attr_proj = oracle::random_matrix(k_l, k_l, rng);
  p.lad.classifier = oracle::random_matrix(c_s, k_l, rng);
  p.x_s = oracle::random_matrix(k_o, n, rng);
  p.h = oracle::random_matrix(c_s, n, rng);
  p.residual_dict = oracle::random_matrix(k_o, k_r, rng);
  p.residual_classifier = oracle::random_matrix(c_s, k_r, rng);
  p.latent_predictor = oracle::random_matrix(k_r, k_l, rng);
  return p;
}

double stacked_objective(const Parts& p, const MatrixXd& codes, double delta, double eta) {
  return (p.x_s - p.lad.feature_dict * p.lad.latent_codes - p.residual_dict * codes).squaredNorm() +
         delta * delta *
             (p.h - p.lad.classifier * p.lad.latent_codes - p.residual_classifier * codes)
                 .squaredNorm() +
         eta * eta * (codes - p.latent_predictor * p.lad.latent_codes).squaredNorm();
}

}  // namespace

TEST_CASE("update_residual_codes: orthonormal projection limit") {
  szsc::Rng rng(1);
  Parts p = random_parts(2);
  p.residual_dict = orthonormal(12, 3, rng);
  const MatrixXd codes = szsc::update_residual_codes(p.residual_dict, p.residual_classifier,
                                                     p.latent_predictor, p.lad, p.x_s, p.h, 0.0,
                                                     0.0, {});
  const MatrixXd want =
      p.residual_dict.transpose() * (p.x_s - p.lad.feature_dict * p.lad.latent_codes);
  CHECK((codes - want).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("update_residual_codes: huge eta pins the codes to the predictor") {
  Parts p = random_parts(3);
  const MatrixXd codes = szsc::update_residual_codes(p.residual_dict, p.residual_classifier,
                                                     p.latent_predictor, p.lad, p.x_s, p.h, 0.0,
                                                     1e6, {});
  const MatrixXd want = p.latent_predictor * p.lad.latent_codes;
  CHECK(((codes - want).cwiseAbs().array() / (want.cwiseAbs().array() + 1e-12)).maxCoeff() < 1e-4);
}

TEST_CASE("update_residual_codes: matches a gradient-descent oracle on the stacked system") {
  Parts p = random_parts(4);
  const double delta = 0.7, eta = 0.4;
  const MatrixXd codes = szsc::update_residual_codes(p.residual_dict, p.residual_classifier,
                                                     p.latent_predictor, p.lad, p.x_s, p.h, delta,
                                                     eta, {});
  // stacked design and targets, solved independently
  const Eigen::Index k_o = p.x_s.rows(), c_s = p.h.rows(), k_r = p.residual_dict.cols();
  MatrixXd a(k_o + c_s + k_r, k_r), b(k_o + c_s + k_r, p.x_s.cols());
  a << p.residual_dict, delta * p.residual_classifier,
      -eta * MatrixXd::Identity(k_r, k_r);
  b << p.x_s - p.lad.feature_dict * p.lad.latent_codes,
      delta * (p.h - p.lad.classifier * p.lad.latent_codes),
      -eta * (p.latent_predictor * p.lad.latent_codes);
  const MatrixXd ref = oracle::ridge_gradient_descent(a, b, 0.0);
  CHECK((codes - ref).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("update_residual_dict: zero residue gives a zero dictionary") {
  Parts p = random_parts(5);
  p.x_s = p.lad.feature_dict * p.lad.latent_codes;
  szsc::Rng rng(6);
  const MatrixXd codes = oracle::random_matrix(3, 15, rng);
  const MatrixXd dict = szsc::update_residual_dict(p.x_s, p.lad, codes, {});
  CHECK(dict.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("update_residual_dict and classifier and predictor: oracle agreement") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Parts p = random_parts(seed + 10);
    szsc::Rng rng(seed + 99);
    const MatrixXd codes = oracle::random_matrix(3, 15, rng);

    const MatrixXd y1 = p.x_s - p.lad.feature_dict * p.lad.latent_codes;
    const MatrixXd d1 = szsc::update_residual_dict(p.x_s, p.lad, codes, {});
    CHECK(oracle::dict_objective(y1, codes, d1) <=
          oracle::dict_objective(y1, codes, oracle::dict_projected_gradient(y1, codes)) +
              1e-6 * (1.0 + y1.squaredNorm()));

    const MatrixXd y2 = p.h - p.lad.classifier * p.lad.latent_codes;
    const MatrixXd d2 = szsc::update_residual_classifier(p.h, p.lad, codes, {});
    CHECK(oracle::dict_objective(y2, codes, d2) <=
          oracle::dict_objective(y2, codes, oracle::dict_projected_gradient(y2, codes)) +
              1e-6 * (1.0 + y2.squaredNorm()));

    const MatrixXd d3 = szsc::update_latent_predictor(codes, p.lad.latent_codes, {});
    CHECK(oracle::dict_objective(codes, p.lad.latent_codes, d3) <=
          oracle::dict_objective(codes, p.lad.latent_codes,
                                 oracle::dict_projected_gradient(codes, p.lad.latent_codes)) +
              1e-6 * (1.0 + codes.squaredNorm()));
  }
}

TEST_CASE("update_residual_classifier: exact labels give a zero classifier") {
  Parts p = random_parts(20);
  p.h = p.lad.classifier * p.lad.latent_codes;
  szsc::Rng rng(21);
  const MatrixXd codes = oracle::random_matrix(3, 15, rng);
  const MatrixXd v = szsc::update_residual_classifier(p.h, p.lad, codes, {});
  CHECK(v.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("update_latent_predictor: identity-reproducing and zero cases") {
  szsc::Rng rng(22);
  const MatrixXd l = oracle::random_matrix(4, 20, rng);
  const MatrixXd w_same = szsc::update_latent_predictor(l, l, {});
  CHECK((w_same - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);
  const MatrixXd w_zero = szsc::update_latent_predictor(MatrixXd::Zero(4, 20), l, {});
  CHECK(w_zero.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("residual_objective: sign structure and naive recomputation") {
  Parts p = random_parts(30);
  szsc::Rng rng(31);
  szsc::ResidualModel res;
  res.residual_dict = p.residual_dict;
  res.residual_codes = oracle::random_matrix(3, 15, rng);
  res.residual_classifier = p.residual_classifier;
  res.latent_predictor = p.latent_predictor;

  const double with_eta0 = szsc::residual_objective(p.lad, res, p.x_s, p.h, 0.9, 0.0);
  CHECK(with_eta0 >= 0.0);

  // all factors and data zero
  szsc::LadModel zlad;
  zlad.feature_dict = MatrixXd::Zero(5, 2);
  zlad.latent_codes = MatrixXd::Zero(2, 4);
  zlad.attr_proj = MatrixXd::Zero(2, 2);
  zlad.classifier = MatrixXd::Zero(3, 2);
  szsc::ResidualModel zres;
  zres.residual_dict = MatrixXd::Zero(5, 2);
  zres.residual_codes = MatrixXd::Zero(2, 4);
  zres.residual_classifier = MatrixXd::Zero(3, 2);
  zres.latent_predictor = MatrixXd::Zero(2, 2);
  CHECK(szsc::residual_objective(zlad, zres, MatrixXd::Zero(5, 4), MatrixXd::Zero(3, 4), 1.0,
                                 0.0) == 0.0);

  // naive recomputation with explicit loops
  auto sq = [](const MatrixXd& a) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      for (Eigen::Index r = 0; r < a.rows(); ++r) s += a(r, c) * a(r, c);
    }
    return s;
  };
  const double delta = 0.8, eta = 0.3;
  const double got = szsc::residual_objective(p.lad, res, p.x_s, p.h, delta, eta);
  const double want =
      sq(p.x_s - p.lad.feature_dict * p.lad.latent_codes - res.residual_dict * res.residual_codes) +
      delta * sq(p.h - p.lad.classifier * p.lad.latent_codes -
                 res.residual_classifier * res.residual_codes) -
      eta * sq(res.residual_codes - res.latent_predictor * p.lad.latent_codes);
  CHECK(std::abs(got - want) < 1e-10);
}

TEST_CASE("fit_residual: per-update surrogate descent") {
  Parts p = random_parts(40);
  const double delta = 1.0, eta = 0.5;
  szsc::Rng rng(41);
  MatrixXd dict = szsc::random_unit_columns(12, 3, rng);
  MatrixXd cls = szsc::random_unit_columns(3, 3, rng);
  MatrixXd pred = szsc::random_unit_columns(3, 4, rng);
  Parts q = p;
  q.residual_dict = dict;
  q.residual_classifier = cls;
  q.latent_predictor = pred;
  MatrixXd codes;
  double prev = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < 4; ++sweep) {
    codes = szsc::update_residual_codes(q.residual_dict, q.residual_classifier,
                                        q.latent_predictor, q.lad, q.x_s, q.h, delta, eta, {});
    double obj = stacked_objective(q, codes, delta, eta);
    CHECK(obj <= prev + 1e-9);
    prev = obj;
    q.residual_dict = szsc::update_residual_dict(q.x_s, q.lad, codes, {});
    obj = stacked_objective(q, codes, delta, eta);
    CHECK(obj <= prev + 1e-9);
    prev = obj;
    q.residual_classifier = szsc::update_residual_classifier(q.h, q.lad, codes, {});
    obj = stacked_objective(q, codes, delta, eta);
    CHECK(obj <= prev + 1e-9);
    prev = obj;
    q.latent_predictor = szsc::update_latent_predictor(codes, q.lad.latent_codes, {});
    obj = stacked_objective(q, codes, delta, eta);
    CHECK(obj <= prev + 1e-9);
    prev = obj;
  }
}

TEST_CASE("fit_residual: planted data reaches the noise floor") {
  const auto p = planted::make_residual_problem(50, 24, 6, 4, 5, 24, 1e-4);
  szsc::HyperParams params;
  params.delta = 1.0;
  params.eta = 0.5;
  params.k_residual = 4;
  params.k_latent = 6;
  params.solver.max_iters = 300;
  params.solver.rel_tol = 1e-12;
  const auto fit = szsc::fit_residual(p.x_s, p.h, p.labels, p.seen_order, p.lad, params, 51);
  CHECK(fit.surrogate.back() < 1e-4 * p.x_s.squaredNorm());
}

TEST_CASE("fit_residual: minimal residual dimension completes") {
  const auto p = planted::make_residual_problem(60, 10, 4, 2, 3, 8, 0.01);
  szsc::HyperParams params;
  params.k_residual = 1;
  params.k_latent = 4;
  params.solver.max_iters = 30;
  const auto fit = szsc::fit_residual(p.x_s, p.h, p.labels, p.seen_order, p.lad, params, 61);
  CHECK(fit.model.residual_dict.cols() == 1);
  CHECK(fit.model.residual_codes.rows() == 1);
  CHECK(fit.model.residual_classifier.cols() == 1);
  CHECK(fit.model.latent_predictor.rows() == 1);
  CHECK(fit.model.class_centers.rows() == 1);
}

TEST_CASE("fit_residual: deterministic for a fixed seed") {
  const auto p = planted::make_residual_problem(70, 12, 4, 3, 3, 10, 0.02);
  szsc::HyperParams params;
  params.k_residual = 3;
  params.k_latent = 4;
  params.solver.max_iters = 20;
  const auto f1 = szsc::fit_residual(p.x_s, p.h, p.labels, p.seen_order, p.lad, params, 71);
  const auto f2 = szsc::fit_residual(p.x_s, p.h, p.labels, p.seen_order, p.lad, params, 71);
  CHECK(std::memcmp(f1.model.residual_codes.data(), f2.model.residual_codes.data(),
                    sizeof(double) * f1.model.residual_codes.size()) == 0);
  CHECK(f1.surrogate == f2.surrogate);
}

TEST_CASE("class_means: reconstruction identity") {
  szsc::Rng rng(80);
  const MatrixXd codes = oracle::random_matrix(3, 12, rng);
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) labels.push_back(rng.uniform_int(3) + 5);
  const std::vector<int> order{5, 6, 7};
  const MatrixXd centers = szsc::class_means(codes, labels, order);
  // counts per class times center column equals the class column-sum
  for (std::size_t j = 0; j < order.size(); ++j) {
    VectorXd colsum = VectorXd::Zero(3);
    long count = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == order[j]) {
        colsum += codes.col(static_cast<Eigen::Index>(i));
        ++count;
      }
    }
    CHECK((static_cast<double>(count) * centers.col(static_cast<Eigen::Index>(j)) - colsum)
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("fit_augmented: wires both stages together") {
  const auto p = planted::make_residual_problem(90, 16, 5, 3, 4, 12, 0.02);
  szsc::Dataset ds;
  ds.features = p.x_s;
  ds.labels = p.labels;
  szsc::Rng attr_rng(91);
  ds.class_attr = oracle::random_matrix(5, 5, attr_rng);
  ds.seen_classes = {0, 1, 2, 3};
  ds.unseen_classes = {4};
  szsc::HyperParams params;
  params.k_latent = 0;  // resolves to K_d
  params.k_residual = 3;
  params.solver.max_iters = 15;
  const auto trained = szsc::fit_augmented(ds, params, 92);
  CHECK(trained.model.params.k_latent == 5);
  CHECK(trained.model.lad.feature_dict.cols() == 5);
  CHECK(trained.model.residual.class_centers.cols() == 4);
  CHECK(trained.model.seen_class_order == std::vector<int>{0, 1, 2, 3});
  CHECK(!trained.lad_objectives.empty());
  CHECK(!trained.residual_surrogate.empty());
}
