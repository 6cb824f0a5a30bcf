#pragma once

// Plain-text file formats and model persistence. All writes go through a
// temp-file-plus-rename path so interrupted runs never leave torn outputs.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "szsc/cv.hpp"
#include "szsc/data_model.hpp"
#include "szsc/eval.hpp"
#include "szsc/inference.hpp"
#include "szsc/residual.hpp"

namespace szsc {

// Shortest decimal form that round-trips a double exactly.
std::string fmt_double(double v);

// Matrix text format: a "rows cols" header line, then one line per row of
// space-separated values.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is, const std::string& context);
void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);

// Dataset directory: features.txt, labels.txt, class_attr.txt, split.txt and
// optionally sample_attrs.txt.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& dir);

enum class ResidualCenters { TrainingCodes, Reinfer };

// Run-level configuration parsed from a line-oriented "key value" file.
struct TrainConfig {
  HyperParams params;
  std::uint64_t seed = 0;
  double epsilon = 1e-3;
  MatchSpace match_space = MatchSpace::Defined;
  ResidualCenters residual_centers = ResidualCenters::TrainingCodes;
};
TrainConfig read_train_config(const std::filesystem::path& path);

SearchPlan read_search_plan(const std::filesystem::path& path);

// Model archive: one matrix file per learned factor plus a manifest carrying
// the hyperparameters, the seen-class ordering and all dimensions.
struct TrainTrace {
  double lad_initial_objective = 0.0;
  std::vector<double> lad_objectives;
  std::vector<double> residual_surrogate;
  std::vector<double> residual_objective;
};
void save_model(const std::filesystem::path& dir, const AugmentedModel& model,
                const TrainTrace* trace = nullptr);
AugmentedModel load_model(const std::filesystem::path& dir);

struct PredictionRow {
  long sample_id = 0;
  int predicted = -1;
  double conf_d = 0.0;
  double conf_r = 0.0;
  double conf = 0.0;
};
void write_predictions(const std::filesystem::path& path, const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> read_predictions(const std::filesystem::path& path);

// External classifier output: one "<sample_id> <predicted> <confidence>" line
// per sample.
struct ExternalRow {
  long sample_id = 0;
  int predicted = -1;
  double conf = 0.0;
};
std::vector<ExternalRow> read_external(const std::filesystem::path& path);

std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

// "coverage,risk" lines followed by a trailing "AURCC,<value>" line.
void write_curve_csv(const std::filesystem::path& path, const RiskCoverageCurve& curve);
// Static rendering of the curve.
void write_curve_svg(const std::filesystem::path& path, const RiskCoverageCurve& curve);

// Chosen configuration as a loadable params file, score table appended as
// comment lines.
void write_search_result(const std::filesystem::path& path, const SearchResult& result,
                         const SearchPlan& plan);

// Text written to `path` atomically (temp + rename).
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& body);

}  // namespace szsc
