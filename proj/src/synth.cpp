#include "szsc/synth.hpp"

#include "szsc/errors.hpp"
#include "szsc/lad.hpp"
#include "szsc/rng.hpp"

namespace szsc {

namespace {

// Residual prototypes are scaled so they contribute comparably to the defined
// part; the class-conditional residual direction is what the consistency
// confidence keys on.
constexpr double kResidualScale = 1.2;

}  // namespace

SynthData synth_generate(const SynthConfig& cfg) {
  if (cfg.k_o < 1 || cfg.k_d < 1 || cfg.k_l < 1 || cfg.k_r < 1 || cfg.classes_seen < 1 ||
      cfg.classes_unseen < 1 || cfg.samples_per_class < 1) {
    throw InputError("synth_generate: all counts must be >= 1");
  }
  if (!(cfg.noise >= 0.0)) throw InputError("synth_generate: noise must be >= 0");

  Rng rng(cfg.seed);
  const int n_classes = cfg.classes_seen + cfg.classes_unseen;
  const Eigen::Index n = static_cast<Eigen::Index>(n_classes) * cfg.samples_per_class;

  SynthData out;
  out.feature_dict = random_unit_columns(cfg.k_o, cfg.k_l, rng);
  out.attr_proj = random_unit_columns(cfg.k_l, cfg.k_d, rng);
  out.residual_dict = random_unit_columns(cfg.k_o, cfg.k_r, rng);

  Eigen::MatrixXd class_attr(cfg.k_d, n_classes);
  for (int c = 0; c < n_classes; ++c) {
    for (int r = 0; r < cfg.k_d; ++r) class_attr(r, c) = rng.uniform();
  }
  out.class_residuals = kResidualScale * random_unit_columns(cfg.k_r, n_classes, rng);

  Dataset& ds = out.dataset;
  ds.class_attr = class_attr;
  for (int c = 0; c < cfg.classes_seen; ++c) ds.seen_classes.insert(c);
  for (int c = cfg.classes_seen; c < n_classes; ++c) ds.unseen_classes.insert(c);

  ds.features.resize(cfg.k_o, n);
  ds.sample_attrs.resize(cfg.k_d, n);
  ds.labels.reserve(static_cast<std::size_t>(n));
  const Eigen::MatrixXd defined_part = out.feature_dict * out.attr_proj;  // K_o x K_d

  Eigen::Index col = 0;
  for (int c = 0; c < n_classes; ++c) {
    const Eigen::VectorXd base =
        defined_part * class_attr.col(c) + out.residual_dict * out.class_residuals.col(c);
    for (int s = 0; s < cfg.samples_per_class; ++s, ++col) {
      Eigen::VectorXd x = base;
      if (cfg.noise > 0.0) {
        for (int r = 0; r < cfg.k_o; ++r) x[r] += cfg.noise * rng.gaussian();
      }
      ds.features.col(col) = x;
      ds.sample_attrs.col(col) = class_attr.col(c);
      ds.labels.push_back(c);
    }
  }
  return out;
}

}  // namespace szsc
