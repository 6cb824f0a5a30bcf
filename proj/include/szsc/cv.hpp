#pragma once

// Class-wise cross-validation: whole seen classes are held out per fold and
// act as pseudo-unseen, and the hyperparameters are searched in stages so the
// grids never form one joint product.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "szsc/data_model.hpp"

namespace szsc {

struct SearchPlan {
  std::vector<double> alpha_grid{1.0};
  std::vector<double> beta_grid{1.0};
  std::vector<double> delta_grid{1.0};
  std::vector<double> eta_grid{0.1};
  std::vector<int> k_r_grid{8};
  std::vector<double> gamma_grid{0.01};
  std::vector<double> lambda_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int fold_count = 5;
  std::uint64_t seed = 0;
  int k_l = 0;  // 0 means "match K_d"
  double tau = 0.0;
  SolverSettings solver;
};

// Deterministic partition of the seen classes into fold_count groups whose
// sizes differ by at most one; a function of (seed, sorted ids) only.
std::map<int, int> class_folds(const std::set<int>& seen_classes, int fold_count,
                               std::uint64_t seed);

// One fold's view: held-out classes are removed from everything the trainer
// sees and come back only as the validation targets.
struct FoldSplit {
  Dataset train;                    // seen = training classes, unseen = validation classes
  Eigen::MatrixXd val_features;     // columns of the held-out samples
  std::vector<int> val_labels;
  std::vector<int> val_class_ids;   // sorted held-out class ids
  Eigen::MatrixXd val_class_attr;   // columns aligned with val_class_ids
};
std::vector<FoldSplit> make_fold_splits(const Dataset& ds, const std::map<int, int>& assignment,
                                        int fold_count);

struct ScoreEntry {
  int stage = 0;
  std::string config;       // human-readable "key=value" description
  double mean_aurcc = 0.0;  // meaningless when infeasible
  bool feasible = true;
};

struct SearchResult {
  HyperParams chosen;
  std::vector<ScoreEntry> table;
};

// Staged grid search scored by mean validation-fold AURCC: (alpha, beta) on
// the defined-attribute classifier alone, then (delta, eta, k_r) on the
// combined confidence swept over lambda, then gamma, then lambda.
SearchResult staged_search(const Dataset& ds, const SearchPlan& plan);

// First index holding the strictly smallest value; earlier entries win ties.
std::size_t pick_best(const std::vector<double>& scores);

// Worker cap for fold-times-configuration fits: SZSC_THREADS when set,
// otherwise the hardware concurrency.
int harness_threads();

}  // namespace szsc
