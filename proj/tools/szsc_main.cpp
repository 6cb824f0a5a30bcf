// Command-line surface: synth / train / predict / evaluate / cv / combine.
// Failures exit nonzero with a single machine-parsable "error: <kind>: ..."
// line on stderr; outputs are written atomically.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <unordered_map>

#include "szsc/errors.hpp"
#include "szsc/eval.hpp"
#include "szsc/inference.hpp"
#include "szsc/io.hpp"
#include "szsc/synth.hpp"

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void require_valid(const szsc::Dataset& ds, const std::string& dir) {
  const auto rep = szsc::validate(ds);
  if (rep.ok()) return;
  throw szsc::InputError("dataset " + dir + " invalid (" + std::to_string(rep.violations.size()) +
                         " violations; first: " + rep.violations.front() + ")");
}

struct UnseenView {
  Eigen::MatrixXd attr;
  std::vector<int> ids;
};

UnseenView unseen_view(const szsc::Dataset& ds) {
  UnseenView v;
  v.ids = szsc::sorted_ids(ds.unseen_classes);
  if (v.ids.empty()) throw szsc::InputError("dataset has no unseen classes");
  v.attr.resize(ds.class_attr.rows(), static_cast<Eigen::Index>(v.ids.size()));
  for (std::size_t j = 0; j < v.ids.size(); ++j) {
    v.attr.col(static_cast<Eigen::Index>(j)) = ds.class_attr.col(v.ids[j]);
  }
  return v;
}

int run(int argc, char** argv) {
  CLI::App app{"selective zero-shot classification toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
  szsc::SynthConfig synth_cfg;
  std::string synth_out, synth_truth;
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--seed", synth_cfg.seed, "generator seed");
  synth->add_option("--k-o", synth_cfg.k_o, "feature dimension");
  synth->add_option("--k-d", synth_cfg.k_d, "defined attribute dimension");
  synth->add_option("--k-l", synth_cfg.k_l, "planted latent dimension");
  synth->add_option("--k-r", synth_cfg.k_r, "planted residual dimension");
  synth->add_option("--seen", synth_cfg.classes_seen, "number of seen classes");
  synth->add_option("--unseen", synth_cfg.classes_unseen, "number of unseen classes");
  synth->add_option("--per-class", synth_cfg.samples_per_class, "samples per class");
  synth->add_option("--noise", synth_cfg.noise, "per-entry noise level");
  synth->add_option("--truth", synth_truth, "also dump the planted factors here");

  // train
  auto* train = app.add_subcommand("train", "fit both stages and write a model archive");
  std::string train_data, train_params, train_out;
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--params", train_params, "hyperparameter file")->required();
  train->add_option("--out", train_out, "model archive directory")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "score the unseen-labelled samples");
  std::string pred_model, pred_data, pred_out;
  double pred_lambda = 0.0;
  double pred_epsilon = 1e-3;
  std::string pred_space = "defined";
  predict->add_option("--model", pred_model, "model archive directory")->required();
  predict->add_option("--data", pred_data, "dataset directory")->required();
  predict->add_option("--lambda", pred_lambda, "confidence trade-off in [0,1]")->required();
  predict->add_option("--out", pred_out, "predictions file")->required();
  predict->add_option("--epsilon", pred_epsilon, "code-recovery ridge weight");
  predict->add_option("--match-space", pred_space, "defined|latent");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "risk-coverage curve of a predictions file");
  std::string eval_pred, eval_labels, eval_curve, eval_svg;
  evaluate->add_option("--pred", eval_pred, "predictions file")->required();
  evaluate->add_option("--labels", eval_labels, "ground-truth labels, one per line")->required();
  evaluate->add_option("--out-curve", eval_curve, "curve csv output")->required();
  evaluate->add_option("--svg", eval_svg, "optional svg rendering");

  // cv
  auto* cv = app.add_subcommand("cv", "staged cross-validated hyperparameter search");
  std::string cv_data, cv_plan, cv_out;
  cv->add_option("--data", cv_data, "dataset directory")->required();
  cv->add_option("--plan", cv_plan, "search plan file")->required();
  cv->add_option("--out", cv_out, "chosen parameters + score table output")->required();

  // combine
  auto* combine = app.add_subcommand("combine", "combine an external confidence with conf_r");
  std::string comb_ext, comb_model, comb_data, comb_out;
  double comb_lambda = 0.0;
  double comb_epsilon = 1e-3;
  combine->add_option("--pred-ext", comb_ext, "external predictions: id predicted conf")
      ->required();
  combine->add_option("--model", comb_model, "model archive directory")->required();
  combine->add_option("--data", comb_data, "dataset directory")->required();
  combine->add_option("--lambda", comb_lambda, "confidence trade-off in [0,1]")->required();
  combine->add_option("--out", comb_out, "combined predictions file")->required();
  combine->add_option("--epsilon", comb_epsilon, "code-recovery ridge weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  if (synth->parsed()) {
    const szsc::SynthData data = szsc::synth_generate(synth_cfg);
    szsc::write_dataset(synth_out, data.dataset);
    if (!synth_truth.empty()) {
      szsc::write_matrix_file(std::filesystem::path(synth_truth) / "feature_dict.txt",
                              data.feature_dict);
      szsc::write_matrix_file(std::filesystem::path(synth_truth) / "attr_proj.txt",
                              data.attr_proj);
      szsc::write_matrix_file(std::filesystem::path(synth_truth) / "residual_dict.txt",
                              data.residual_dict);
      szsc::write_matrix_file(std::filesystem::path(synth_truth) / "class_residuals.txt",
                              data.class_residuals);
    }
    return 0;
  }

  if (train->parsed()) {
    const szsc::TrainConfig cfg = szsc::read_train_config(train_params);
    const szsc::Dataset ds = szsc::read_dataset(train_data);
    require_valid(ds, train_data);
    szsc::TrainedModel trained = szsc::fit_augmented(ds, cfg.params, cfg.seed);
    if (cfg.residual_centers == szsc::ResidualCenters::Reinfer) {
      const szsc::TrainingSplit split = szsc::training_split(ds);
      trained.model.residual.class_centers = szsc::recompute_residual_centers(
          trained.model, split.features, split.labels, cfg.epsilon);
    }
    szsc::TrainTrace trace{trained.lad_initial_objective, trained.lad_objectives,
                           trained.residual_surrogate, trained.residual_objective};
    szsc::save_model(train_out, trained.model, &trace);
    return 0;
  }

  if (predict->parsed()) {
    const szsc::AugmentedModel model = szsc::load_model(pred_model);
    const szsc::Dataset ds = szsc::read_dataset(pred_data);
    require_valid(ds, pred_data);
    const UnseenView unseen = unseen_view(ds);
    szsc::InferenceOptions opts;
    opts.epsilon = pred_epsilon;
    if (pred_space == "latent") opts.match_space = szsc::MatchSpace::Latent;
    else if (pred_space != "defined") {
      throw szsc::InputError("--match-space must be 'defined' or 'latent'");
    }

    const std::vector<long> test_idx = szsc::unseen_sample_indices(ds);
    if (test_idx.empty()) throw szsc::InputError("no samples carry an unseen label");
    Eigen::MatrixXd x_test(ds.features.rows(), static_cast<Eigen::Index>(test_idx.size()));
    for (std::size_t j = 0; j < test_idx.size(); ++j) {
      x_test.col(static_cast<Eigen::Index>(j)) = ds.features.col(test_idx[j]);
    }
    const auto reports =
        szsc::predict_all(x_test, model, unseen.attr, unseen.ids, pred_lambda, opts);
    std::vector<szsc::PredictionRow> rows;
    rows.reserve(reports.size());
    for (std::size_t j = 0; j < reports.size(); ++j) {
      rows.push_back({test_idx[j], reports[j].predicted_class, reports[j].conf_d,
                      reports[j].conf_r, reports[j].conf});
    }
    szsc::write_predictions(pred_out, rows);
    return 0;
  }

  if (evaluate->parsed()) {
    const auto rows = szsc::read_predictions(eval_pred);
    const auto labels = szsc::read_labels(eval_labels);
    std::vector<double> conf;
    std::vector<bool> correct;
    conf.reserve(rows.size());
    correct.reserve(rows.size());
    for (const auto& r : rows) {
      if (r.sample_id < 0 || r.sample_id >= static_cast<long>(labels.size())) {
        throw szsc::InputError("prediction row references sample " +
                               std::to_string(r.sample_id) + " outside the label file");
      }
      conf.push_back(r.conf);
      correct.push_back(r.predicted == labels[static_cast<std::size_t>(r.sample_id)]);
    }
    const szsc::RiskCoverageCurve curve = szsc::rcc(conf, correct);
    szsc::write_curve_csv(eval_curve, curve);
    if (!eval_svg.empty()) szsc::write_curve_svg(eval_svg, curve);
    return 0;
  }

  if (cv->parsed()) {
    const szsc::SearchPlan plan = szsc::read_search_plan(cv_plan);
    const szsc::Dataset ds = szsc::read_dataset(cv_data);
    require_valid(ds, cv_data);
    const szsc::SearchResult result = szsc::staged_search(ds, plan);
    szsc::write_search_result(cv_out, result, plan);
    return 0;
  }

  if (combine->parsed()) {
    const auto ext_rows = szsc::read_external(comb_ext);
    const szsc::AugmentedModel model = szsc::load_model(comb_model);
    const szsc::Dataset ds = szsc::read_dataset(comb_data);
    require_valid(ds, comb_data);
    const UnseenView unseen = unseen_view(ds);
    szsc::InferenceOptions opts;
    opts.epsilon = comb_epsilon;

    const std::vector<long> test_idx = szsc::unseen_sample_indices(ds);
    Eigen::MatrixXd x_test(ds.features.rows(), static_cast<Eigen::Index>(test_idx.size()));
    for (std::size_t j = 0; j < test_idx.size(); ++j) {
      x_test.col(static_cast<Eigen::Index>(j)) = ds.features.col(test_idx[j]);
    }
    const auto reports =
        szsc::predict_all(x_test, model, unseen.attr, unseen.ids, comb_lambda, opts);
    std::unordered_map<long, double> conf_r_of;
    for (std::size_t j = 0; j < test_idx.size(); ++j) conf_r_of[test_idx[j]] = reports[j].conf_r;

    std::vector<szsc::PredictionRow> rows;
    rows.reserve(ext_rows.size());
    for (const auto& e : ext_rows) {
      const auto it = conf_r_of.find(e.sample_id);
      if (it == conf_r_of.end()) {
        throw szsc::InputError("external row references sample " + std::to_string(e.sample_id) +
                               " which carries no unseen label in the dataset");
      }
      const double conf_r = it->second;
      rows.push_back({e.sample_id, e.predicted, e.conf, conf_r,
                      szsc::combine_external(e.conf, conf_r, comb_lambda)});
    }
    szsc::write_predictions(comb_out, rows);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const szsc::InputError& e) {
    std::cerr << "error: input: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const szsc::NumericalError& e) {
    std::cerr << "error: numerical: " << one_line(e.what()) << '\n';
    return 3;
  } catch (const szsc::IoError& e) {
    std::cerr << "error: io: " << one_line(e.what()) << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 5;
  }
}
