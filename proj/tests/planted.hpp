#pragma once

// Planted problem builders shared by the fitting tests: data generated from
// feasible factor models so the alternating fits have an exact optimum to find.

#include <Eigen/Dense>

#include <vector>

#include "oracles.hpp"
#include "szsc/data_model.hpp"
#include "szsc/lad.hpp"

namespace planted {

struct LadProblem {
  Eigen::MatrixXd x_s;  // K_o x N
  Eigen::MatrixXd d_s;  // K_d x N
  Eigen::MatrixXd h;    // C_s x N
  szsc::LadModel truth;
};

// Noise-free instance where all three objective terms vanish at a feasible
// model: per-class attribute columns are scaled until the exact one-hot
// classifier has unit-norm-feasible columns.
inline LadProblem make_lad_problem(std::uint64_t seed, int k_o, int k_d, int classes,
                                   int per_class) {
  szsc::Rng rng(seed);
  const int k_l = k_d;
  LadProblem p;
  p.truth.feature_dict = szsc::random_unit_columns(k_o, k_l, rng);
  p.truth.attr_proj = szsc::random_unit_columns(k_l, k_d, rng);

  Eigen::MatrixXd class_attr = oracle::random_matrix(k_d, classes, rng, 0.0, 1.0);
  Eigen::MatrixXd latent_proto = p.truth.attr_proj * class_attr;  // K_l x C_s
  // U latent_proto = I needs the pseudo-inverse; scale the attributes until
  // its columns are inside the unit ball.
  Eigen::MatrixXd u =
      latent_proto.completeOrthogonalDecomposition().pseudoInverse();  // C_s x K_l
  double max_col = 0.0;
  for (Eigen::Index i = 0; i < u.cols(); ++i) max_col = std::max(max_col, u.col(i).norm());
  const double scale = std::max(1.0, max_col) * 1.1;
  class_attr *= scale;
  latent_proto *= scale;
  u /= scale;
  p.truth.classifier = u;

  const Eigen::Index n = static_cast<Eigen::Index>(classes) * per_class;
  p.d_s.resize(k_d, n);
  p.h = Eigen::MatrixXd::Zero(classes, n);
  std::vector<int> labels;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int c = static_cast<int>(j) % classes;
    p.d_s.col(j) = class_attr.col(c);
    p.h(c, j) = 1.0;
    labels.push_back(c);
  }
  p.truth.latent_codes = p.truth.attr_proj * p.d_s;
  p.x_s = p.truth.feature_dict * p.truth.latent_codes;
  return p;
}

struct ResidualProblem {
  Eigen::MatrixXd x_s;
  Eigen::MatrixXd h;
  std::vector<int> labels;
  std::vector<int> seen_order;
  szsc::LadModel lad;
};

// First-stage factors planted exactly (classifier reproduces the labels), and
// a residual component whose codes are a feasible function of the latent codes
// so the stacked objective can reach the noise floor.
inline ResidualProblem make_residual_problem(std::uint64_t seed, int k_o, int k_d, int k_r,
                                             int classes, int per_class, double noise) {
  szsc::Rng rng(seed ^ 0x5eedULL);
  LadProblem base = make_lad_problem(seed, k_o, k_d, classes, per_class);
  ResidualProblem p;
  p.x_s = base.x_s;
  p.h = base.h;
  p.lad = base.truth;
  for (Eigen::Index j = 0; j < base.h.cols(); ++j) {
    for (int c = 0; c < classes; ++c) {
      if (base.h(c, j) == 1.0) p.labels.push_back(c);
    }
    p.seen_order.clear();
  }
  for (int c = 0; c < classes; ++c) p.seen_order.push_back(c);

  Eigen::MatrixXd residual_dict = szsc::random_unit_columns(k_o, k_r, rng);
  Eigen::MatrixXd predictor = szsc::random_unit_columns(k_r, static_cast<int>(base.truth.latent_codes.rows()), rng);
  predictor *= 0.5;  // keep the planted predictor strictly feasible
  const Eigen::MatrixXd residual_codes = predictor * base.truth.latent_codes;
  p.x_s += residual_dict * residual_codes;
  if (noise > 0.0) {
    for (Eigen::Index c = 0; c < p.x_s.cols(); ++c) {
      for (Eigen::Index r = 0; r < p.x_s.rows(); ++r) p.x_s(r, c) += noise * rng.gaussian();
    }
  }
  return p;
}

}  // namespace planted
