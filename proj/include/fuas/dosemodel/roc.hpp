#pragma once

#include <span>
#include <vector>

namespace fuas::dose {

/// AUC = P(score+ > score-) + ½ P(tie), computed exactly from counts.
/// Throws SingleClass when either class is absent, InvalidValue on size mismatch.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
  double threshold = 0;
  double tpr = 0;
  double fpr = 0;
};

/// Operating points for thresholds at every distinct score (descending), plus (0,0).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

}  // namespace fuas::dose
