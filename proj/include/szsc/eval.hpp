#pragma once

// Selective-classification metrics: empirical coverage and risk, the
// risk-coverage curve swept over confidence thresholds, and its area.

#include <optional>
#include <vector>

namespace szsc {

struct RiskPoint {
  double coverage = 0.0;  // accepted fraction, in (0, 1]
  double risk = 0.0;      // 0/1 error rate over the accepted samples
};

struct RiskCoverageCurve {
  std::vector<RiskPoint> points;  // coverage strictly increasing, ends at 1
  double aurcc = 0.0;             // in [0, 1]; lower is better
};

// Empirical coverage and selective risk of one accept/reject assignment.
// Returns nothing when no sample is accepted (risk is undefined there).
std::optional<RiskPoint> coverage_risk(const std::vector<bool>& correct,
                                       const std::vector<bool>& accepted);

// Sweeps the acceptance threshold across the confidences, descending. Samples
// sharing a confidence value enter coverage as one block, so the curve has one
// point per distinct value. The area integrates risk over coverage with each
// block's risk held constant down to the previous point (the first block's
// down to zero), normalized by the coverage span.
RiskCoverageCurve rcc(const std::vector<double>& confidences, const std::vector<bool>& correct);

// -1 when A has the lower area, +1 when B does, 0 on a tie.
int aurcc_compare(const RiskCoverageCurve& a, const RiskCoverageCurve& b);

}  // namespace szsc
