#pragma once

// Dataset container for a zero-shot problem instance, plus the label helpers
// the trainers build on.

#include <Eigen/Dense>

#include <set>
#include <string>
#include <vector>

#include "szsc/matrix_core.hpp"

namespace szsc {

// A zero-shot problem instance. Feature vectors are columns; class ids index
// columns of the class-level attribute table.
struct Dataset {
  Eigen::MatrixXd features;      // K_o x N
  std::vector<int> labels;       // N class ids
  Eigen::MatrixXd sample_attrs;  // K_d x N per-sample attribute annotations; 0x0 when absent
  Eigen::MatrixXd class_attr;    // K_d x C class-level attribute table over all classes
  std::set<int> seen_classes;
  std::set<int> unseen_classes;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every structural invariant and reports all violations with
// row/column coordinates. Violations are data, not failures.
ValidationReport validate(const Dataset& ds);

// One-hot label matrix: row r of column i is 1 iff sample i carries the r-th
// class of `class_order`.
using OneHotLabels = Eigen::MatrixXd;
OneHotLabels one_hot(const std::vector<int>& labels, const std::vector<int>& class_order);

struct HyperParams {
  double alpha = 1.0;
  double beta = 1.0;
  double delta = 1.0;
  double eta = 0.1;
  double gamma = 0.01;  // ridge weight of the similarity-vector coding
  double lambda = 0.5;  // confidence trade-off, in [0, 1]
  int k_latent = 0;     // latent attribute dimension; 0 means "match K_d"
  int k_residual = 8;   // residual attribute dimension
  double tau = 0.0;     // abstention threshold
  SolverSettings solver;
};

// Throws InputError on the first violated constraint. A k_latent of 0 is the
// accepted "match K_d" sentinel; it is resolved before fitting.
void validate_params(const HyperParams& p);

std::vector<int> sorted_ids(const std::set<int>& ids);

// The training-side view of a dataset: samples labelled with a seen class, in
// their original order. When per-sample attributes are absent they are
// materialized by broadcasting each sample's class column.
struct TrainingSplit {
  Eigen::MatrixXd features;        // K_o x N_s
  Eigen::MatrixXd sample_attrs;    // K_d x N_s
  std::vector<int> labels;         // N_s
  std::vector<int> seen_order;     // sorted seen class ids
  Eigen::MatrixXd class_attr_seen; // K_d x C_s, columns follow seen_order
};
TrainingSplit training_split(const Dataset& ds);

// Column indices of samples carrying an unseen label, in dataset order.
std::vector<long> unseen_sample_indices(const Dataset& ds);

}  // namespace szsc
