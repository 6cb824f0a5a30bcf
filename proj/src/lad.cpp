#include "szsc/lad.hpp"

#include <cmath>
#include <string>

#include "szsc/errors.hpp"

namespace szsc {

namespace {

void check_dims(const LadModel& m, const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& d_s,
                const Eigen::MatrixXd& h) {
  const auto k_l = m.feature_dict.cols();
  if (m.latent_codes.rows() != k_l || m.attr_proj.rows() != k_l || m.classifier.cols() != k_l ||
      m.feature_dict.rows() != x_s.rows() || m.latent_codes.cols() != x_s.cols() ||
      m.attr_proj.cols() != d_s.rows() || d_s.cols() != x_s.cols() ||
      m.classifier.rows() != h.rows() || h.cols() != x_s.cols()) {
    throw InputError("lad_objective: inconsistent dimensions");
  }
}

}  // namespace

Eigen::MatrixXd random_unit_columns(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-1.0, 1.0);
    const double n = m.col(c).norm();
    if (n > 0.0) m.col(c) /= n;
  }
  return m;
}

double lad_objective(const LadModel& m, const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& d_s,
                     const Eigen::MatrixXd& h, double alpha, double beta) {
  check_dims(m, x_s, d_s, h);
  return (x_s - m.feature_dict * m.latent_codes).squaredNorm() +
         alpha * (m.latent_codes - m.attr_proj * d_s).squaredNorm() +
         beta * (h - m.classifier * m.latent_codes).squaredNorm();
}

Eigen::MatrixXd update_latent_codes(const LadModel& m, const Eigen::MatrixXd& x_s,
                                    const Eigen::MatrixXd& d_s, const Eigen::MatrixXd& h,
                                    double alpha, double beta, const SolverSettings& settings) {
  check_dims(m, x_s, d_s, h);
  const auto k_o = x_s.rows();
  const auto k_l = m.feature_dict.cols();
  const auto c_s = h.rows();
  const double ra = std::sqrt(alpha);
  const double rb = std::sqrt(beta);

  Eigen::MatrixXd stacked_a(k_o + k_l + c_s, k_l);
  stacked_a.topRows(k_o) = m.feature_dict;
  stacked_a.middleRows(k_o, k_l) = ra * Eigen::MatrixXd::Identity(k_l, k_l);
  stacked_a.bottomRows(c_s) = rb * m.classifier;

  Eigen::MatrixXd stacked_b(k_o + k_l + c_s, x_s.cols());
  stacked_b.topRows(k_o) = x_s;
  stacked_b.middleRows(k_o, k_l) = ra * (m.attr_proj * d_s);
  stacked_b.bottomRows(c_s) = rb * h;

  return ridge_solve(stacked_a, stacked_b, 0.0, settings);
}

LadFit fit_lad(const Eigen::MatrixXd& x_s, const Eigen::MatrixXd& d_s, const Eigen::MatrixXd& h,
               const HyperParams& params, std::uint64_t seed) {
  if (x_s.cols() != d_s.cols() || x_s.cols() != h.cols()) {
    throw InputError("fit_lad: sample counts disagree");
  }
  if (params.k_latent < 1) throw InputError("fit_lad: k_l must be >= 1");
  const auto k_l = static_cast<Eigen::Index>(params.k_latent);

  Rng rng(seed);
  LadFit fit;
  LadModel& m = fit.model;
  m.feature_dict = random_unit_columns(x_s.rows(), k_l, rng);
  m.attr_proj = random_unit_columns(k_l, d_s.rows(), rng);
  m.classifier = random_unit_columns(h.rows(), k_l, rng);
  m.latent_codes = m.attr_proj * d_s;  // feasible start consistent with the attribute prior

  fit.initial_objective = lad_objective(m, x_s, d_s, h, params.alpha, params.beta);
  double prev = fit.initial_objective;
  const SolverSettings& s = params.solver;

  for (int sweep = 0; sweep < s.max_iters; ++sweep) {
    m.latent_codes = update_latent_codes(m, x_s, d_s, h, params.alpha, params.beta, s);
    m.feature_dict = constrained_dict_solve(x_s, m.latent_codes, s);
    m.attr_proj = constrained_dict_solve(m.latent_codes, d_s, s);
    m.classifier = constrained_dict_solve(h, m.latent_codes, s);

    const double obj = lad_objective(m, x_s, d_s, h, params.alpha, params.beta);
    if (!std::isfinite(obj)) {
      throw NumericalError("fit_lad: non-finite objective at sweep " + std::to_string(sweep + 1));
    }
    fit.objectives.push_back(obj);
    const double rel = std::abs(prev - obj) / std::max(std::abs(prev), 1e-300);
    prev = obj;
    if (rel < s.rel_tol) break;
  }
  return fit;
}

}  // namespace szsc
