#include "szsc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "szsc/errors.hpp"

namespace szsc {

std::optional<RiskPoint> coverage_risk(const std::vector<bool>& correct,
                                       const std::vector<bool>& accepted) {
  if (correct.empty()) throw InputError("coverage_risk: empty input");
  if (correct.size() != accepted.size()) {
    throw InputError("coverage_risk: correct and accepted lengths differ");
  }
  long n_acc = 0, n_wrong = 0;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    if (!accepted[i]) continue;
    ++n_acc;
    if (!correct[i]) ++n_wrong;
  }
  if (n_acc == 0) return std::nullopt;
  return RiskPoint{static_cast<double>(n_acc) / static_cast<double>(correct.size()),
                   static_cast<double>(n_wrong) / static_cast<double>(n_acc)};
}

RiskCoverageCurve rcc(const std::vector<double>& confidences, const std::vector<bool>& correct) {
  if (confidences.empty()) throw InputError("rcc: empty input");
  if (confidences.size() != correct.size()) {
    throw InputError("rcc: confidence and correctness lengths differ");
  }
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (!std::isfinite(confidences[i])) {
      throw InputError("rcc: confidence of sample " + std::to_string(i) + " is not finite");
    }
  }

  const auto n = confidences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return confidences[a] > confidences[b]; });

  RiskCoverageCurve curve;
  long n_acc = 0, n_wrong = 0;
  std::size_t i = 0;
  while (i < n) {
    const double value = confidences[order[i]];
    while (i < n && confidences[order[i]] == value) {  // equal-confidence block
      ++n_acc;
      if (!correct[order[i]]) ++n_wrong;
      ++i;
    }
    curve.points.push_back(RiskPoint{static_cast<double>(n_acc) / static_cast<double>(n),
                                     static_cast<double>(n_wrong) / static_cast<double>(n_acc)});
  }

  double area = 0.0;
  double prev_cov = 0.0;
  for (const RiskPoint& p : curve.points) {
    area += p.risk * (p.coverage - prev_cov);
    prev_cov = p.coverage;
  }
  curve.aurcc = area / curve.points.back().coverage;
  return curve;
}

int aurcc_compare(const RiskCoverageCurve& a, const RiskCoverageCurve& b) {
  if (a.points.empty() || b.points.empty()) throw InputError("aurcc_compare: empty curve");
  if (a.aurcc < b.aurcc) return -1;
  if (a.aurcc > b.aurcc) return 1;
  return 0;
}

}  // namespace szsc
