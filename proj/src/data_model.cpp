#include "szsc/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "szsc/errors.hpp"

namespace szsc {

namespace {

void check_finite(const Eigen::MatrixXd& m, const std::string& name,
                  std::vector<std::string>& out) {
  if (m.allFinite()) return;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (!std::isfinite(m(r, c))) {
        out.push_back(name + "(" + std::to_string(r) + "," + std::to_string(c) +
                      ") is not finite");
      }
    }
  }
}

}  // namespace

ValidationReport validate(const Dataset& ds) {
  ValidationReport rep;
  auto& v = rep.violations;

  const auto n = ds.features.cols();
  const auto k_o = ds.features.rows();
  const auto k_d = ds.class_attr.rows();
  const auto n_classes = ds.class_attr.cols();

  if (n < 1) v.push_back("features: no samples (N must be >= 1)");
  if (k_o < 1) v.push_back("features: no rows (K_o must be >= 1)");
  if (k_d < 1) v.push_back("class_attr: no rows (K_d must be >= 1)");
  if (n_classes < 1) v.push_back("class_attr: no columns");
  if (static_cast<Eigen::Index>(ds.labels.size()) != n) {
    v.push_back("labels: " + std::to_string(ds.labels.size()) + " entries for " +
                std::to_string(n) + " samples");
  }
  if (ds.sample_attrs.size() != 0) {
    if (ds.sample_attrs.rows() != k_d) {
      v.push_back("sample_attrs: " + std::to_string(ds.sample_attrs.rows()) +
                  " rows but class_attr has " + std::to_string(k_d));
    }
    if (ds.sample_attrs.cols() != n) {
      v.push_back("sample_attrs: " + std::to_string(ds.sample_attrs.cols()) +
                  " columns for " + std::to_string(n) + " samples");
    }
  }

  for (int id : ds.seen_classes) {
    if (ds.unseen_classes.count(id)) {
      v.push_back("class " + std::to_string(id) + " is both seen and unseen");
    }
  }
  for (int id : ds.seen_classes) {
    if (id < 0 || id >= n_classes) {
      v.push_back("seen class " + std::to_string(id) + " does not index a class_attr column");
    }
  }
  for (int id : ds.unseen_classes) {
    if (id < 0 || id >= n_classes) {
      v.push_back("unseen class " + std::to_string(id) + " does not index a class_attr column");
    }
  }

  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    const int y = ds.labels[i];
    if (!ds.seen_classes.count(y) && !ds.unseen_classes.count(y)) {
      v.push_back("label of sample " + std::to_string(i) + " (" + std::to_string(y) +
                  ") is neither seen nor unseen");
    }
  }

  check_finite(ds.features, "features", v);
  check_finite(ds.sample_attrs, "sample_attrs", v);
  if (!ds.class_attr.allFinite()) {
    for (Eigen::Index c = 0; c < ds.class_attr.cols(); ++c) {
      if (!ds.class_attr.col(c).allFinite()) {
        v.push_back("class_attr column for class " + std::to_string(c) +
                    " contains a non-finite entry");
      }
    }
  }
  return rep;
}

OneHotLabels one_hot(const std::vector<int>& labels, const std::vector<int>& class_order) {
  std::unordered_map<int, int> row_of;
  for (std::size_t r = 0; r < class_order.size(); ++r) row_of[class_order[r]] = static_cast<int>(r);
  OneHotLabels h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(class_order.size()),
                                         static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = row_of.find(labels[i]);
    if (it == row_of.end()) {
      throw InputError("one_hot: label " + std::to_string(labels[i]) + " of sample " +
                       std::to_string(i) + " is not in the class order");
    }
    h(it->second, static_cast<Eigen::Index>(i)) = 1.0;
  }
  return h;
}

void validate_params(const HyperParams& p) {
  auto nonneg = [](double x, const char* name) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InputError(std::string("params: ") + name + " must be finite and >= 0");
    }
  };
  nonneg(p.alpha, "alpha");
  nonneg(p.beta, "beta");
  nonneg(p.delta, "delta");
  nonneg(p.eta, "eta");
  nonneg(p.gamma, "gamma");
  if (!(p.lambda >= 0.0 && p.lambda <= 1.0)) throw InputError("params: lambda must be in [0, 1]");
  if (p.k_latent < 0) throw InputError("params: k_l must be >= 1 (or 0 to match K_d)");
  if (p.k_residual < 1) throw InputError("params: k_r must be >= 1");
  if (!std::isfinite(p.tau)) throw InputError("params: tau must be finite");
  if (p.solver.max_iters < 1) throw InputError("params: max_iters must be >= 1");
  if (!(p.solver.rel_tol > 0.0)) throw InputError("params: rel_tol must be > 0");
  if (!(p.solver.jitter >= 0.0)) throw InputError("params: jitter must be >= 0");
}

std::vector<int> sorted_ids(const std::set<int>& ids) {
  return std::vector<int>(ids.begin(), ids.end());  // std::set iterates in order
}

TrainingSplit training_split(const Dataset& ds) {
  TrainingSplit split;
  split.seen_order = sorted_ids(ds.seen_classes);
  if (split.seen_order.empty()) throw InputError("training_split: no seen classes");

  std::vector<Eigen::Index> cols;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    if (ds.seen_classes.count(ds.labels[i])) cols.push_back(static_cast<Eigen::Index>(i));
  }
  if (cols.empty()) throw InputError("training_split: no samples carry a seen label");

  const auto k_d = ds.class_attr.rows();
  split.features.resize(ds.features.rows(), static_cast<Eigen::Index>(cols.size()));
  split.sample_attrs.resize(k_d, static_cast<Eigen::Index>(cols.size()));
  split.labels.reserve(cols.size());
  const bool broadcast = ds.sample_attrs.size() == 0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Eigen::Index c = cols[j];
    split.features.col(static_cast<Eigen::Index>(j)) = ds.features.col(c);
    split.sample_attrs.col(static_cast<Eigen::Index>(j)) =
        broadcast ? ds.class_attr.col(ds.labels[static_cast<std::size_t>(c)])
                  : ds.sample_attrs.col(c);
    split.labels.push_back(ds.labels[static_cast<std::size_t>(c)]);
  }

  split.class_attr_seen.resize(k_d, static_cast<Eigen::Index>(split.seen_order.size()));
  for (std::size_t j = 0; j < split.seen_order.size(); ++j) {
    split.class_attr_seen.col(static_cast<Eigen::Index>(j)) = ds.class_attr.col(split.seen_order[j]);
  }
  return split;
}

std::vector<long> unseen_sample_indices(const Dataset& ds) {
  std::vector<long> idx;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    if (ds.unseen_classes.count(ds.labels[i])) idx.push_back(static_cast<long>(i));
  }
  return idx;
}

}  // namespace szsc
