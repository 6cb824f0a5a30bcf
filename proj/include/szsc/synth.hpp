#pragma once

// Seeded synthetic benchmark generator: a planted factor model with
// class-level attribute and residual prototypes, so desk-scale runs have both
// a recoverable structure and a residual signal the confidence can exploit.

#include <Eigen/Dense>

#include <cstdint>

#include "szsc/data_model.hpp"

namespace szsc {

struct SynthConfig {
  std::uint64_t seed = 0;
  int k_o = 64;  // feature dimension
  int k_d = 16;  // defined attribute dimension
  int k_l = 16;  // latent dimension of the planted projection
  int k_r = 8;   // residual dimension
  int classes_seen = 10;
  int classes_unseen = 4;
  int samples_per_class = 50;
  double noise = 0.05;  // per-entry Gaussian noise level
};

struct SynthData {
  Dataset dataset;
  // Planted factors: features = feature_dict * attr_proj * attrs
  //                            + residual_dict * residuals + noise.
  Eigen::MatrixXd feature_dict;     // K_o x K_l, unit columns
  Eigen::MatrixXd attr_proj;        // K_l x K_d, unit columns
  Eigen::MatrixXd residual_dict;    // K_o x K_r, unit columns
  Eigen::MatrixXd class_residuals;  // K_r x C, per-class residual prototypes
};

SynthData synth_generate(const SynthConfig& cfg);

}  // namespace szsc
