#include "szsc/residual.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "szsc/errors.hpp"

namespace szsc {

Eigen::MatrixXd update_residual_codes(const Eigen::MatrixXd& residual_dict,
                                      const Eigen::MatrixXd& residual_classifier,
                                      const Eigen::MatrixXd& latent_predictor, const LadModel& lad,
                                      const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& h,
                                      double delta, double eta, const SolverSettings& settings) {
  const auto k_o = x_s.rows();
  const auto c_s = h.rows();
  const auto k_r = residual_dict.cols();
  const auto n = x_s.cols();
  if (residual_dict.rows() != k_o || residual_classifier.rows() != c_s ||
      residual_classifier.cols() != k_r || latent_predictor.rows() != k_r ||
      latent_predictor.cols() != lad.latent_codes.rows() || lad.latent_codes.cols() != n ||
      h.cols() != n) {
    throw InputError("update_residual_codes: inconsistent dimensions");
  }

  Eigen::MatrixXd stacked_dict(k_o + c_s + k_r, k_r);
  stacked_dict.topRows(k_o) = residual_dict;
  stacked_dict.middleRows(k_o, c_s) = delta * residual_classifier;
  stacked_dict.bottomRows(k_r) = -eta * Eigen::MatrixXd::Identity(k_r, k_r);

  Eigen::MatrixXd stacked_target(k_o + c_s + k_r, n);
  stacked_target.topRows(k_o) = x_s - lad.feature_dict * lad.latent_codes;
  stacked_target.middleRows(k_o, c_s) = delta * (h - lad.classifier * lad.latent_codes);
  stacked_target.bottomRows(k_r) = -eta * (latent_predictor * lad.latent_codes);

  return ridge_solve(stacked_dict, stacked_target, 0.0, settings);
}

Eigen::MatrixXd update_residual_dict(const Eigen::MatrixXd& x_s, const LadModel& lad,
                                     const Eigen::MatrixXd& residual_codes,
                                     const SolverSettings& settings) {
  return constrained_dict_solve(x_s - lad.feature_dict * lad.latent_codes, residual_codes,
                                settings);
}

Eigen::MatrixXd update_residual_classifier(const Eigen::MatrixXd& h, const LadModel& lad,
                                           const Eigen::MatrixXd& residual_codes,
                                           const SolverSettings& settings) {
  return constrained_dict_solve(h - lad.classifier * lad.latent_codes, residual_codes, settings);
}

Eigen::MatrixXd update_latent_predictor(const Eigen::MatrixXd& residual_codes,
                                        const Eigen::MatrixXd& latent_codes,
                                        const SolverSettings& settings) {
  return constrained_dict_solve(residual_codes, latent_codes, settings);
}

double residual_surrogate(const LadModel& lad, const ResidualModel& res, const Eigen::MatrixXd& x_s,
                          const Eigen::MatrixXd& h, double delta, double eta) {
  const Eigen::MatrixXd recon = x_s - lad.feature_dict * lad.latent_codes -
                                res.residual_dict * res.residual_codes;
  const Eigen::MatrixXd label = h - lad.classifier * lad.latent_codes -
                                res.residual_classifier * res.residual_codes;
  const Eigen::MatrixXd redund = res.residual_codes - res.latent_predictor * lad.latent_codes;
  return recon.squaredNorm() + delta * delta * label.squaredNorm() +
         eta * eta * redund.squaredNorm();
}

double residual_objective(const LadModel& lad, const ResidualModel& res, const Eigen::MatrixXd& x_s,
                          const Eigen::MatrixXd& h, double delta, double eta) {
  if (res.residual_codes.cols() != x_s.cols() || h.cols() != x_s.cols()) {
    throw InputError("residual_objective: inconsistent dimensions");
  }
  const Eigen::MatrixXd recon = x_s - lad.feature_dict * lad.latent_codes -
                                res.residual_dict * res.residual_codes;
  const Eigen::MatrixXd label = h - lad.classifier * lad.latent_codes -
                                res.residual_classifier * res.residual_codes;
  const Eigen::MatrixXd redund = res.residual_codes - res.latent_predictor * lad.latent_codes;
  return recon.squaredNorm() + delta * label.squaredNorm() - eta * redund.squaredNorm();
}

Eigen::MatrixXd class_means(const Eigen::MatrixXd& codes, const std::vector<int>& labels,
                            const std::vector<int>& seen_order) {
  if (static_cast<Eigen::Index>(labels.size()) != codes.cols()) {
    throw InputError("class_means: label count does not match code columns");
  }
  std::unordered_map<int, int> col_of;
  for (std::size_t j = 0; j < seen_order.size(); ++j) col_of[seen_order[j]] = static_cast<int>(j);

  Eigen::MatrixXd centers =
      Eigen::MatrixXd::Zero(codes.rows(), static_cast<Eigen::Index>(seen_order.size()));
  std::vector<long> counts(seen_order.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = col_of.find(labels[i]);
    if (it == col_of.end()) {
      throw InputError("class_means: label " + std::to_string(labels[i]) +
                       " is not a seen class");
    }
    centers.col(it->second) += codes.col(static_cast<Eigen::Index>(i));
    ++counts[static_cast<std::size_t>(it->second)];
  }
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] > 0) centers.col(static_cast<Eigen::Index>(j)) /= static_cast<double>(counts[j]);
  }
  return centers;
}

ResidualFit fit_residual(const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& h,
                         const std::vector<int>& labels, const std::vector<int>& seen_order,
                         const LadModel& lad, const HyperParams& params, std::uint64_t seed) {
  if (x_s.cols() != h.cols() || static_cast<Eigen::Index>(labels.size()) != x_s.cols()) {
    throw InputError("fit_residual: sample counts disagree");
  }
  if (params.k_residual < 1) throw InputError("fit_residual: k_r must be >= 1");
  const auto k_r = static_cast<Eigen::Index>(params.k_residual);
  const auto k_l = lad.latent_codes.rows();

  Rng rng(seed);
  ResidualFit fit;
  ResidualModel& m = fit.model;
  m.residual_dict = random_unit_columns(x_s.rows(), k_r, rng);
  m.residual_classifier = random_unit_columns(h.rows(), k_r, rng);
  m.latent_predictor = random_unit_columns(k_r, k_l, rng);

  const SolverSettings& s = params.solver;
  double prev = 0.0;
  for (int sweep = 0; sweep < s.max_iters; ++sweep) {
    m.residual_codes = update_residual_codes(m.residual_dict, m.residual_classifier,
                                             m.latent_predictor, lad, x_s, h, params.delta,
                                             params.eta, s);
    m.residual_dict = update_residual_dict(x_s, lad, m.residual_codes, s);
    m.residual_classifier = update_residual_classifier(h, lad, m.residual_codes, s);
    m.latent_predictor = update_latent_predictor(m.residual_codes, lad.latent_codes, s);

    const double sur = residual_surrogate(lad, m, x_s, h, params.delta, params.eta);
    if (!std::isfinite(sur)) {
      throw NumericalError("fit_residual: non-finite objective at sweep " +
                           std::to_string(sweep + 1));
    }
    fit.surrogate.push_back(sur);
    fit.objective.push_back(residual_objective(lad, m, x_s, h, params.delta, params.eta));
    if (sweep > 0) {
      const double rel = std::abs(prev - sur) / std::max(std::abs(prev), 1e-300);
      if (rel < s.rel_tol) {
        prev = sur;
        break;
      }
    }
    prev = sur;
  }
  m.class_centers = class_means(m.residual_codes, labels, seen_order);
  return fit;
}

TrainedModel fit_augmented(const Dataset& ds, const HyperParams& params, std::uint64_t seed) {
  HyperParams p = params;
  const TrainingSplit split = training_split(ds);
  if (p.k_latent == 0) p.k_latent = static_cast<int>(split.sample_attrs.rows());
  validate_params(p);
  if (p.k_latent < 1) throw InputError("fit_augmented: k_l must be >= 1");

  const OneHotLabels h = one_hot(split.labels, split.seen_order);
  LadFit lad_fit = fit_lad(split.features, split.sample_attrs, h, p, seed);
  ResidualFit res_fit = fit_residual(split.features, h, split.labels, split.seen_order,
                                     lad_fit.model, p, mix_seed(seed, 0x52455349duLL));

  TrainedModel out;
  out.model.lad = std::move(lad_fit.model);
  out.model.residual = std::move(res_fit.model);
  out.model.params = p;
  out.model.seen_class_order = split.seen_order;
  out.model.class_attr_seen = split.class_attr_seen;
  out.lad_initial_objective = lad_fit.initial_objective;
  out.lad_objectives = std::move(lad_fit.objectives);
  out.residual_surrogate = std::move(res_fit.surrogate);
  out.residual_objective = std::move(res_fit.objective);
  return out;
}

}  // namespace szsc
