#pragma once

// First training stage: alternating fit of the feature dictionary, the latent
// codes derived from the defined attributes, the attribute-to-latent
// projection, and the seen-class classifier.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "szsc/data_model.hpp"
#include "szsc/rng.hpp"

namespace szsc {

struct LadModel {
  Eigen::MatrixXd feature_dict;  // K_o x K_l, unit-norm columns
  Eigen::MatrixXd latent_codes;  // K_l x N_s
  Eigen::MatrixXd attr_proj;     // K_l x K_d, unit-norm columns
  Eigen::MatrixXd classifier;    // C_s x K_l, unit-norm columns
};

// |X - Q L|_F^2 + alpha |L - P D|_F^2 + beta |H - U L|_F^2
double lad_objective(const LadModel& m, const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& d_s,
                     const Eigen::MatrixXd& h, double alpha, double beta);

// Exact minimizer of the objective in the latent codes with everything else
// fixed (a stacked least-squares solve).
Eigen::MatrixXd update_latent_codes(const LadModel& m, const Eigen::MatrixXd& x_s,
                                    const Eigen::MatrixXd& d_s, const Eigen::MatrixXd& h,
                                    double alpha, double beta, const SolverSettings& settings);

struct LadFit {
  LadModel model;
  double initial_objective = 0.0;
  std::vector<double> objectives;  // one entry per completed sweep
};

// Alternating minimization: codes, then the three constrained dictionaries,
// until the relative objective change drops below rel_tol or max_iters sweeps.
LadFit fit_lad(const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& d_s, const Eigen::MatrixXd& h,
               const HyperParams& params, std::uint64_t seed);

// Uniform [-1,1] entries, columns scaled to unit norm.
Eigen::MatrixXd random_unit_columns(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace szsc
