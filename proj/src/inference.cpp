#include "szsc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "szsc/errors.hpp"

namespace szsc {

namespace {

struct BatchCodes {
  Eigen::MatrixXd latent;    // K_l x n
  Eigen::MatrixXd residual;  // K_r x n
};

BatchCodes recover_codes(const Eigen::MatrixXd& x, const AugmentedModel& model, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("infer_codes: epsilon must be > 0");
  if (!x.allFinite()) throw InputError("infer_codes: sample contains non-finite entries");
  const auto k_o = model.lad.feature_dict.rows();
  if (x.rows() != k_o) {
    throw InputError("infer_codes: sample has " + std::to_string(x.rows()) +
                     " rows, model expects " + std::to_string(k_o));
  }
  const auto k_l = model.lad.feature_dict.cols();
  const auto k_r = model.residual.residual_dict.cols();
  Eigen::MatrixXd dict(k_o, k_l + k_r);
  dict.leftCols(k_l) = model.lad.feature_dict;
  dict.rightCols(k_r) = model.residual.residual_dict;

  const Eigen::MatrixXd codes = ridge_solve(dict, x, epsilon, model.params.solver);
  return {codes.topRows(k_l), codes.bottomRows(k_r)};
}

}  // namespace

AugmentedCode infer_codes(const Eigen::VectorXd& x, const AugmentedModel& model, double epsilon) {
  const BatchCodes codes = recover_codes(x, model, epsilon);
  AugmentedCode out;
  out.latent = codes.latent.col(0);
  out.residual = codes.residual.col(0);
  out.defined = ridge_solve(model.lad.attr_proj, codes.latent, epsilon, model.params.solver).col(0);
  return out;
}

std::pair<int, double> classify(const Eigen::VectorXd& d_hat, const Eigen::MatrixXd& unseen_attr,
                                const std::vector<int>& unseen_ids) {
  if (unseen_attr.cols() < 1) throw InputError("classify: empty unseen class set");
  if (static_cast<Eigen::Index>(unseen_ids.size()) != unseen_attr.cols()) {
    throw InputError("classify: class id count does not match attribute columns");
  }
  // Canonical id order makes the tie-break independent of column permutation.
  std::vector<std::size_t> order(unseen_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return unseen_ids[a] < unseen_ids[b]; });

  int best_id = unseen_ids[order.front()];
  double best_sim = -2.0;
  for (const std::size_t j : order) {
    const double sim = cosine_sim(d_hat, unseen_attr.col(static_cast<Eigen::Index>(j)));
    if (sim > best_sim) {
      best_sim = sim;
      best_id = unseen_ids[j];
    }
  }
  return {best_id, best_sim};
}

Eigen::VectorXd similarity_vector(const Eigen::VectorXd& v, const Eigen::MatrixXd& prototypes,
                                  double gamma) {
  if (prototypes.cols() < 1) throw InputError("similarity_vector: no prototype columns");
  return ridge_solve(prototypes, v, gamma).col(0);
}

double conf_residual(const Eigen::VectorXd& s_d, const Eigen::VectorXd& s_r) {
  return cosine_sim(s_d, s_r);
}

double combine_conf(double conf_d, double conf_r, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("combine_conf: lambda must be in [0, 1]");
  return (1.0 - lambda) * conf_d + lambda * conf_r;
}

std::optional<int> selective_predict(const ConfidenceReport& report, double tau) {
  if (report.conf > tau) return report.predicted_class;
  return std::nullopt;
}

double combine_external(double conf_ext, double conf_r, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("combine_external: lambda must be in [0, 1]");
  }
  return (1.0 - lambda) * conf_ext + lambda * conf_r;
}

std::vector<ConfidenceReport> predict_all(const Eigen::MatrixXd& x, const AugmentedModel& model,
                                          const Eigen::MatrixXd& unseen_attr,
                                          const std::vector<int>& unseen_ids, double lambda,
                                          const InferenceOptions& opts) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("predict: lambda must be in [0, 1]");
  const auto n = x.cols();
  std::vector<ConfidenceReport> reports;
  reports.reserve(static_cast<std::size_t>(n));
  if (n == 0) return reports;

  const BatchCodes codes = recover_codes(x, model, opts.epsilon);
  const double gamma = model.params.gamma;
  const SolverSettings& s = model.params.solver;

  Eigen::MatrixXd side;        // what the nearest-class match runs on
  Eigen::MatrixXd targets;     // unseen class columns in the matching space
  Eigen::MatrixXd prototypes;  // seen class columns in the matching space
  if (opts.match_space == MatchSpace::Defined) {
    side = ridge_solve(model.lad.attr_proj, codes.latent, opts.epsilon, s);
    targets = unseen_attr;
    prototypes = model.class_attr_seen;
  } else {
    side = codes.latent;
    targets = model.lad.attr_proj * unseen_attr;
    prototypes = model.lad.attr_proj * model.class_attr_seen;
  }

  const Eigen::MatrixXd sim_d = ridge_solve(prototypes, side, gamma, s);
  const Eigen::MatrixXd sim_r = ridge_solve(model.residual.class_centers, codes.residual, gamma, s);

  for (Eigen::Index j = 0; j < n; ++j) {
    ConfidenceReport r;
    const auto [cls, sim] = classify(side.col(j), targets, unseen_ids);
    r.predicted_class = cls;
    r.conf_d = sim;
    r.s_d = sim_d.col(j);
    r.s_r = sim_r.col(j);
    r.conf_r = conf_residual(r.s_d, r.s_r);
    r.conf = combine_conf(r.conf_d, r.conf_r, lambda);
    reports.push_back(std::move(r));
  }
  return reports;
}

ConfidenceReport predict_sample(const Eigen::VectorXd& x, const AugmentedModel& model,
                                const Eigen::MatrixXd& unseen_attr,
                                const std::vector<int>& unseen_ids, double lambda,
                                const InferenceOptions& opts) {
  return predict_all(x, model, unseen_attr, unseen_ids, lambda, opts).front();
}

Eigen::MatrixXd recompute_residual_centers(const AugmentedModel& model,
                                           const Eigen::MatrixXd& train_features,
                                           const std::vector<int>& train_labels, double epsilon) {
  const BatchCodes codes = recover_codes(train_features, model, epsilon);
  return class_means(codes.residual, train_labels, model.seen_class_order);
}

}  // namespace szsc
