#pragma once

// Test-time pipeline: code recovery for a sample, nearest-class prediction on
// the defined attributes, the two confidence scores and their combination, and
// the abstaining classifier.

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "szsc/residual.hpp"

namespace szsc {

struct AugmentedCode {
  Eigen::VectorXd latent;    // K_l
  Eigen::VectorXd residual;  // K_r
  Eigen::VectorXd defined;   // K_d attribute prediction
};

struct ConfidenceReport {
  int predicted_class = -1;
  double conf_d = 0.0;  // similarity of the attribute prediction to the winning class
  double conf_r = 0.0;  // consistency of the two similarity profiles
  double conf = 0.0;    // (1 - lambda) conf_d + lambda conf_r
  Eigen::VectorXd s_d;  // C_s similarity profile from the defined attributes
  Eigen::VectorXd s_r;  // C_s similarity profile from the residual attributes
};

// Which space the nearest-class match and the defined-side similarity profile
// live in: attribute space (class columns as given) or latent space (class
// columns pushed through the attribute projection).
enum class MatchSpace { Defined, Latent };

struct InferenceOptions {
  double epsilon = 1e-3;  // ridge weight of the code-recovery solves
  MatchSpace match_space = MatchSpace::Defined;
};

// Joint ridge recovery of the latent and residual codes over the concatenated
// dictionaries, then attribute recovery back through the projection.
AugmentedCode infer_codes(const Eigen::VectorXd& x, const AugmentedModel& model, double epsilon);

// argmax over unseen classes of the cosine to their attribute columns; ties
// break toward the smallest class id. Returns (class id, winning similarity).
std::pair<int, double> classify(const Eigen::VectorXd& d_hat, const Eigen::MatrixXd& unseen_attr,
                                const std::vector<int>& unseen_ids);

// Ridge coding of `v` against class prototype columns; one coefficient per class.
Eigen::VectorXd similarity_vector(const Eigen::VectorXd& v, const Eigen::MatrixXd& prototypes,
                                  double gamma);

double conf_residual(const Eigen::VectorXd& s_d, const Eigen::VectorXd& s_r);

// (1 - lambda) conf_d + lambda conf_r, lambda in [0, 1].
double combine_conf(double conf_d, double conf_r, double lambda);

// Predicted class when conf is strictly above tau, otherwise abstain.
std::optional<int> selective_predict(const ConfidenceReport& report, double tau);

// Confidence combination for an external classifier's score.
double combine_external(double conf_ext, double conf_r, double lambda);

ConfidenceReport predict_sample(const Eigen::VectorXd& x, const AugmentedModel& model,
                                const Eigen::MatrixXd& unseen_attr,
                                const std::vector<int>& unseen_ids, double lambda,
                                const InferenceOptions& opts = {});

// Batch form; column j of `x` yields report j.
std::vector<ConfidenceReport> predict_all(const Eigen::MatrixXd& x, const AugmentedModel& model,
                                          const Eigen::MatrixXd& unseen_attr,
                                          const std::vector<int>& unseen_ids, double lambda,
                                          const InferenceOptions& opts = {});

// Alternative residual centers: re-encode the training samples with the full
// model and average per class, instead of keeping the optimized codes.
Eigen::MatrixXd recompute_residual_centers(const AugmentedModel& model,
                                           const Eigen::MatrixXd& train_features,
                                           const std::vector<int>& train_labels, double epsilon);

}  // namespace szsc
