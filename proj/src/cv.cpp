#include "szsc/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "szsc/errors.hpp"
#include "szsc/eval.hpp"
#include "szsc/inference.hpp"
#include "szsc/rng.hpp"

namespace szsc {

namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

void run_jobs(int n_jobs, const std::function<void(int)>& fn) {
  const int workers = std::min(harness_threads(), n_jobs);
  if (workers <= 1) {
    for (int i = 0; i < n_jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_jobs) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Per-sample validation outcome of one fitted fold at lambda 0; combined
// confidences for any lambda follow from (conf_d, conf_r).
struct FoldEval {
  std::vector<double> conf_d;
  std::vector<double> conf_r;
  std::vector<bool> correct;
};

FoldEval evaluate_fold(const AugmentedModel& model, const FoldSplit& fold) {
  const auto reports =
      predict_all(fold.val_features, model, fold.val_class_attr, fold.val_class_ids, 0.0);
  FoldEval ev;
  ev.conf_d.reserve(reports.size());
  ev.conf_r.reserve(reports.size());
  ev.correct.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    ev.conf_d.push_back(reports[i].conf_d);
    ev.conf_r.push_back(reports[i].conf_r);
    ev.correct.push_back(reports[i].predicted_class == fold.val_labels[i]);
  }
  return ev;
}

double fold_aurcc(const std::vector<double>& conf, const std::vector<bool>& correct) {
  return rcc(conf, correct).aurcc;
}

// Mean over folds of the per-fold AURCC at one lambda.
double mean_aurcc_at_lambda(const std::vector<FoldEval>& evals, double lambda) {
  double sum = 0.0;
  for (const FoldEval& ev : evals) {
    std::vector<double> conf(ev.conf_d.size());
    for (std::size_t i = 0; i < conf.size(); ++i) {
      conf[i] = combine_conf(ev.conf_d[i], ev.conf_r[i], lambda);
    }
    sum += fold_aurcc(conf, ev.correct);
  }
  return sum / static_cast<double>(evals.size());
}

// Best mean AURCC achievable over the lambda grid.
double best_over_lambda(const std::vector<FoldEval>& evals, const std::vector<double>& grid) {
  std::vector<double> scores;
  scores.reserve(grid.size());
  for (const double l : grid) scores.push_back(mean_aurcc_at_lambda(evals, l));
  return scores[pick_best(scores)];
}

std::uint64_t fold_seed(const SearchPlan& plan, int fold) {
  return mix_seed(plan.seed, 0x464f4c44ULL + static_cast<std::uint64_t>(fold));
}

}  // namespace

int harness_threads() {
  if (const char* env = std::getenv("SZSC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::size_t pick_best(const std::vector<double>& scores) {
  if (scores.empty()) throw InputError("pick_best: empty score list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  return best;
}

std::map<int, int> class_folds(const std::set<int>& seen_classes, int fold_count,
                               std::uint64_t seed) {
  if (fold_count < 1) throw InputError("class_folds: fold count must be >= 1");
  if (static_cast<std::size_t>(fold_count) > seen_classes.size()) {
    throw InputError("class_folds: " + std::to_string(fold_count) + " folds for " +
                     std::to_string(seen_classes.size()) + " classes");
  }
  std::vector<int> ids = sorted_ids(seen_classes);
  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {  // Fisher-Yates on the sorted ids
    std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)))]);
  }
  std::map<int, int> assignment;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    assignment[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(fold_count));
  }
  return assignment;
}

std::vector<FoldSplit> make_fold_splits(const Dataset& ds, const std::map<int, int>& assignment,
                                        int fold_count) {
  std::vector<FoldSplit> splits(static_cast<std::size_t>(fold_count));
  for (int f = 0; f < fold_count; ++f) {
    FoldSplit& split = splits[static_cast<std::size_t>(f)];
    std::set<int> val_classes, train_classes;
    for (const auto& [id, fold] : assignment) {
      (fold == f ? val_classes : train_classes).insert(id);
    }
    if (val_classes.empty() || train_classes.empty()) {
      throw InputError("make_fold_splits: fold " + std::to_string(f) + " is degenerate");
    }

    std::vector<Eigen::Index> train_cols, val_cols;
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
      if (train_classes.count(ds.labels[i])) train_cols.push_back(static_cast<Eigen::Index>(i));
      else if (val_classes.count(ds.labels[i])) val_cols.push_back(static_cast<Eigen::Index>(i));
    }

    Dataset& train = split.train;
    train.class_attr = ds.class_attr;
    train.seen_classes = train_classes;
    train.unseen_classes = val_classes;
    train.features.resize(ds.features.rows(), static_cast<Eigen::Index>(train_cols.size()));
    const bool has_attrs = ds.sample_attrs.size() != 0;
    if (has_attrs) {
      train.sample_attrs.resize(ds.sample_attrs.rows(),
                                static_cast<Eigen::Index>(train_cols.size()));
    }
    train.labels.reserve(train_cols.size());
    for (std::size_t j = 0; j < train_cols.size(); ++j) {
      train.features.col(static_cast<Eigen::Index>(j)) = ds.features.col(train_cols[j]);
      if (has_attrs) {
        train.sample_attrs.col(static_cast<Eigen::Index>(j)) = ds.sample_attrs.col(train_cols[j]);
      }
      train.labels.push_back(ds.labels[static_cast<std::size_t>(train_cols[j])]);
    }

    split.val_features.resize(ds.features.rows(), static_cast<Eigen::Index>(val_cols.size()));
    split.val_labels.reserve(val_cols.size());
    for (std::size_t j = 0; j < val_cols.size(); ++j) {
      split.val_features.col(static_cast<Eigen::Index>(j)) = ds.features.col(val_cols[j]);
      split.val_labels.push_back(ds.labels[static_cast<std::size_t>(val_cols[j])]);
    }
    split.val_class_ids = sorted_ids(val_classes);
    split.val_class_attr.resize(ds.class_attr.rows(),
                                static_cast<Eigen::Index>(split.val_class_ids.size()));
    for (std::size_t j = 0; j < split.val_class_ids.size(); ++j) {
      split.val_class_attr.col(static_cast<Eigen::Index>(j)) =
          ds.class_attr.col(split.val_class_ids[j]);
    }
  }
  return splits;
}

SearchResult staged_search(const Dataset& ds, const SearchPlan& plan) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InputError(std::string("staged_search: ") + what);
  };
  require(!plan.alpha_grid.empty() && !plan.beta_grid.empty() && !plan.delta_grid.empty() &&
              !plan.eta_grid.empty() && !plan.k_r_grid.empty() && !plan.gamma_grid.empty() &&
              !plan.lambda_grid.empty(),
          "every grid must be nonempty");
  require(plan.fold_count >= 2, "fold count must be >= 2");

  const auto assignment = class_folds(ds.seen_classes, plan.fold_count, plan.seed);
  const auto folds = make_fold_splits(ds, assignment, plan.fold_count);
  const int n_folds = plan.fold_count;

  HyperParams base;
  base.k_latent = plan.k_l > 0 ? plan.k_l : static_cast<int>(ds.class_attr.rows());
  base.tau = plan.tau;
  base.solver = plan.solver;
  const double provisional_gamma = plan.gamma_grid.front();

  SearchResult result;
  result.chosen = base;

  // Stage 1: (alpha, beta) scored on the defined-attribute classifier alone.
  struct Stage1Cfg {
    double alpha, beta;
  };
  std::vector<Stage1Cfg> s1;
  for (const double a : plan.alpha_grid) {
    for (const double b : plan.beta_grid) s1.push_back({a, b});
  }
  std::vector<double> s1_scores(s1.size() * static_cast<std::size_t>(n_folds), kInfeasible);
  run_jobs(static_cast<int>(s1.size()) * n_folds, [&](int job) {
    const auto cfg = static_cast<std::size_t>(job) / static_cast<std::size_t>(n_folds);
    const int fold = job % n_folds;
    HyperParams p = base;
    p.alpha = s1[cfg].alpha;
    p.beta = s1[cfg].beta;
    p.gamma = provisional_gamma;
    try {
      const TrainingSplit split = training_split(folds[static_cast<std::size_t>(fold)].train);
      const OneHotLabels h = one_hot(split.labels, split.seen_order);
      const LadFit fit =
          fit_lad(split.features, split.sample_attrs, h, p, fold_seed(plan, fold));
      // defined-attribute prediction straight from the first-stage factors
      const FoldSplit& fs = folds[static_cast<std::size_t>(fold)];
      const InferenceOptions opts;
      const Eigen::MatrixXd latent =
          ridge_solve(fit.model.feature_dict, fs.val_features, opts.epsilon, p.solver);
      const Eigen::MatrixXd d_hat =
          ridge_solve(fit.model.attr_proj, latent, opts.epsilon, p.solver);
      std::vector<double> conf(static_cast<std::size_t>(d_hat.cols()));
      std::vector<bool> correct(conf.size());
      for (Eigen::Index j = 0; j < d_hat.cols(); ++j) {
        const auto [cls, sim] = classify(d_hat.col(j), fs.val_class_attr, fs.val_class_ids);
        conf[static_cast<std::size_t>(j)] = sim;
        correct[static_cast<std::size_t>(j)] = cls == fs.val_labels[static_cast<std::size_t>(j)];
      }
      s1_scores[cfg * static_cast<std::size_t>(n_folds) + static_cast<std::size_t>(fold)] =
          fold_aurcc(conf, correct);
    } catch (const NumericalError&) {
      // recorded as infeasible
    } catch (const InputError&) {
    }
  });

  std::vector<double> s1_means(s1.size(), kInfeasible);
  for (std::size_t c = 0; c < s1.size(); ++c) {
    double sum = 0.0;
    bool ok = true;
    for (int f = 0; f < n_folds; ++f) {
      const double v = s1_scores[c * static_cast<std::size_t>(n_folds) + static_cast<std::size_t>(f)];
      if (!std::isfinite(v)) ok = false;
      sum += v;
    }
    if (ok) s1_means[c] = sum / n_folds;
    result.table.push_back({1,
                            "alpha=" + std::to_string(s1[c].alpha) +
                                " beta=" + std::to_string(s1[c].beta),
                            ok ? sum / n_folds : 0.0, ok});
  }
  const std::size_t s1_best = pick_best(s1_means);
  if (!std::isfinite(s1_means[s1_best])) {
    throw NumericalError("staged_search: every (alpha, beta) configuration failed");
  }
  result.chosen.alpha = s1[s1_best].alpha;
  result.chosen.beta = s1[s1_best].beta;

  // First-stage models for the winner, reused by every later stage.
  std::vector<LadModel> lads(static_cast<std::size_t>(n_folds));
  std::vector<TrainingSplit> splits(static_cast<std::size_t>(n_folds));
  std::vector<OneHotLabels> onehots(static_cast<std::size_t>(n_folds));
  run_jobs(n_folds, [&](int fold) {
    HyperParams p = result.chosen;
    splits[static_cast<std::size_t>(fold)] =
        training_split(folds[static_cast<std::size_t>(fold)].train);
    const TrainingSplit& split = splits[static_cast<std::size_t>(fold)];
    onehots[static_cast<std::size_t>(fold)] = one_hot(split.labels, split.seen_order);
    lads[static_cast<std::size_t>(fold)] =
        fit_lad(split.features, split.sample_attrs, onehots[static_cast<std::size_t>(fold)], p,
                fold_seed(plan, fold))
            .model;
  });

  auto assemble = [&](int fold, const ResidualModel& res, const HyperParams& p) {
    AugmentedModel m;
    m.lad = lads[static_cast<std::size_t>(fold)];
    m.residual = res;
    m.params = p;
    m.seen_class_order = splits[static_cast<std::size_t>(fold)].seen_order;
    m.class_attr_seen = splits[static_cast<std::size_t>(fold)].class_attr_seen;
    return m;
  };

  // Stage 2: (delta, eta, k_r) scored on the combined confidence, lambda swept.
  struct Stage2Cfg {
    double delta, eta;
    int k_r;
  };
  std::vector<Stage2Cfg> s2;
  for (const double d : plan.delta_grid) {
    for (const double e : plan.eta_grid) {
      for (const int k : plan.k_r_grid) s2.push_back({d, e, k});
    }
  }
  std::vector<FoldEval> s2_evals(s2.size() * static_cast<std::size_t>(n_folds));
  std::vector<char> s2_ok(s2.size() * static_cast<std::size_t>(n_folds), 0);
  run_jobs(static_cast<int>(s2.size()) * n_folds, [&](int job) {
    const auto cfg = static_cast<std::size_t>(job) / static_cast<std::size_t>(n_folds);
    const int fold = job % n_folds;
    HyperParams p = result.chosen;
    p.delta = s2[cfg].delta;
    p.eta = s2[cfg].eta;
    p.k_residual = s2[cfg].k_r;
    p.gamma = provisional_gamma;
    try {
      const TrainingSplit& split = splits[static_cast<std::size_t>(fold)];
      const ResidualFit fit = fit_residual(split.features, onehots[static_cast<std::size_t>(fold)],
                                           split.labels, split.seen_order,
                                           lads[static_cast<std::size_t>(fold)], p,
                                           mix_seed(fold_seed(plan, fold), cfg + 1));
      const auto idx = cfg * static_cast<std::size_t>(n_folds) + static_cast<std::size_t>(fold);
      s2_evals[idx] = evaluate_fold(assemble(fold, fit.model, p),
                                    folds[static_cast<std::size_t>(fold)]);
      s2_ok[idx] = 1;
    } catch (const NumericalError&) {
    } catch (const InputError&) {
    }
  });

  std::vector<double> s2_means(s2.size(), kInfeasible);
  for (std::size_t c = 0; c < s2.size(); ++c) {
    bool ok = true;
    std::vector<FoldEval> evals;
    for (int f = 0; f < n_folds; ++f) {
      const auto idx = c * static_cast<std::size_t>(n_folds) + static_cast<std::size_t>(f);
      if (!s2_ok[idx]) ok = false;
      else evals.push_back(s2_evals[idx]);
    }
    if (ok) s2_means[c] = best_over_lambda(evals, plan.lambda_grid);
    result.table.push_back({2,
                            "delta=" + std::to_string(s2[c].delta) +
                                " eta=" + std::to_string(s2[c].eta) +
                                " k_r=" + std::to_string(s2[c].k_r),
                            ok ? s2_means[c] : 0.0, ok});
  }
  const std::size_t s2_best = pick_best(s2_means);
  if (!std::isfinite(s2_means[s2_best])) {
    throw NumericalError("staged_search: every (delta, eta, k_r) configuration failed");
  }
  result.chosen.delta = s2[s2_best].delta;
  result.chosen.eta = s2[s2_best].eta;
  result.chosen.k_residual = s2[s2_best].k_r;

  // Winner's residual models, kept for the gamma and lambda stages.
  std::vector<AugmentedModel> models;
  models.reserve(static_cast<std::size_t>(n_folds));
  for (int fold = 0; fold < n_folds; ++fold) {
    HyperParams p = result.chosen;
    p.gamma = provisional_gamma;
    const TrainingSplit& split = splits[static_cast<std::size_t>(fold)];
    const ResidualFit fit =
        fit_residual(split.features, onehots[static_cast<std::size_t>(fold)], split.labels,
                     split.seen_order, lads[static_cast<std::size_t>(fold)], p,
                     mix_seed(fold_seed(plan, fold), s2_best + 1));
    models.push_back(assemble(fold, fit.model, p));
  }

  // Stage 3: gamma.
  std::vector<double> s3_means(plan.gamma_grid.size(), kInfeasible);
  std::vector<std::vector<FoldEval>> s3_evals(plan.gamma_grid.size());
  for (std::size_t g = 0; g < plan.gamma_grid.size(); ++g) {
    bool ok = true;
    std::vector<FoldEval> evals;
    for (int fold = 0; fold < n_folds; ++fold) {
      AugmentedModel& m = models[static_cast<std::size_t>(fold)];
      m.params.gamma = plan.gamma_grid[g];
      try {
        evals.push_back(evaluate_fold(m, folds[static_cast<std::size_t>(fold)]));
      } catch (const NumericalError&) {
        ok = false;
        break;
      } catch (const InputError&) {
        ok = false;
        break;
      }
    }
    if (ok) {
      s3_means[g] = best_over_lambda(evals, plan.lambda_grid);
      s3_evals[g] = std::move(evals);
    }
    result.table.push_back(
        {3, "gamma=" + std::to_string(plan.gamma_grid[g]), ok ? s3_means[g] : 0.0, ok});
  }
  const std::size_t s3_best = pick_best(s3_means);
  if (!std::isfinite(s3_means[s3_best])) {
    throw NumericalError("staged_search: every gamma configuration failed");
  }
  result.chosen.gamma = plan.gamma_grid[s3_best];

  // Stage 4: lambda on the winning gamma's cached fold evaluations.
  std::vector<double> s4_means(plan.lambda_grid.size());
  for (std::size_t l = 0; l < plan.lambda_grid.size(); ++l) {
    s4_means[l] = mean_aurcc_at_lambda(s3_evals[s3_best], plan.lambda_grid[l]);
    result.table.push_back({4, "lambda=" + std::to_string(plan.lambda_grid[l]), s4_means[l], true});
  }
  result.chosen.lambda = plan.lambda_grid[pick_best(s4_means)];
  return result;
}

}  // namespace szsc
