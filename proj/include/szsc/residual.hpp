#pragma once

// Second training stage: with the first-stage model frozen, alternating fit of
// the residual dictionary, the residual codes, the residual classifier and the
// latent-to-residual predictor, plus per-class residual centers.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "szsc/lad.hpp"

namespace szsc {

struct ResidualModel {
  Eigen::MatrixXd residual_dict;        // K_o x K_r, unit-norm columns
  Eigen::MatrixXd residual_codes;       // K_r x N_s
  Eigen::MatrixXd residual_classifier;  // C_s x K_r, unit-norm columns
  Eigen::MatrixXd latent_predictor;     // K_r x K_l, unit-norm columns
  Eigen::MatrixXd class_centers;        // K_r x C_s, per-class means of the codes
};

// Closed-form residual-code update: the minimizer of the stacked system
//   [Q_r; delta V; -eta I] R ~ [X - Q L; delta (H - U L); -eta (W L)].
Eigen::MatrixXd update_residual_codes(const Eigen::MatrixXd& residual_dict,
                                      const Eigen::MatrixXd& residual_classifier,
                                      const Eigen::MatrixXd& latent_predictor, const LadModel& lad,
                                      const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& h,
                                      double delta, double eta, const SolverSettings& settings);

// Constrained least-squares refreshes of the three dictionaries.
Eigen::MatrixXd update_residual_dict(const Eigen::MatrixXd& x_s, const LadModel& lad,
                                     const Eigen::MatrixXd& residual_codes,
                                     const SolverSettings& settings);
Eigen::MatrixXd update_residual_classifier(const Eigen::MatrixXd& h, const LadModel& lad,
                                           const Eigen::MatrixXd& residual_codes,
                                           const SolverSettings& settings);
Eigen::MatrixXd update_latent_predictor(const Eigen::MatrixXd& residual_codes,
                                        const Eigen::MatrixXd& latent_codes,
                                        const SolverSettings& settings);

// The stacked objective every update above descends:
//   |X - QL - Q_r R|^2 + delta^2 |H - UL - V R|^2 + eta^2 |R - W L|^2.
double residual_surrogate(const LadModel& lad, const ResidualModel& res, const Eigen::MatrixXd& x_s,
                          const Eigen::MatrixXd& h, double delta, double eta);

// The literal second-stage objective with its signed redundancy term,
//   |X - QL - Q_r R|^2 + delta |H - UL - V R|^2 - eta |R - W L|^2;
// possibly negative. Reported alongside the surrogate, never optimized.
double residual_objective(const LadModel& lad, const ResidualModel& res, const Eigen::MatrixXd& x_s,
                          const Eigen::MatrixXd& h, double delta, double eta);

// Per-class column means of `codes` following `seen_order`; classes without
// samples get a zero column.
Eigen::MatrixXd class_means(const Eigen::MatrixXd& codes, const std::vector<int>& labels,
                            const std::vector<int>& seen_order);

struct ResidualFit {
  ResidualModel model;
  std::vector<double> surrogate;  // stacked objective per sweep (drives convergence)
  std::vector<double> objective;  // literal signed objective per sweep (reported)
};

ResidualFit fit_residual(const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& h,
                         const std::vector<int>& labels, const std::vector<int>& seen_order,
                         const LadModel& lad, const HyperParams& params, std::uint64_t seed);

// Everything inference needs, bundled.
struct AugmentedModel {
  LadModel lad;
  ResidualModel residual;
  HyperParams params;
  std::vector<int> seen_class_order;
  Eigen::MatrixXd class_attr_seen;  // K_d x C_s, columns follow seen_class_order
};

struct TrainedModel {
  AugmentedModel model;
  double lad_initial_objective = 0.0;
  std::vector<double> lad_objectives;
  std::vector<double> residual_surrogate;
  std::vector<double> residual_objective;
};

// Both stages in order on the seen portion of a dataset.
TrainedModel fit_augmented(const Dataset& ds, const HyperParams& params, std::uint64_t seed);

}  // namespace szsc
