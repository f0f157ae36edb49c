#pragma once

#include "fuas/core/volume.hpp"

namespace fuas::seg {

/// 2|A∩B| / (|A|+|B|) over masks binarized at 0.5; 1 when both are empty.
double dice(const Mask& a, const Mask& b);

/// |A∩B| / |A∪B|; 1 when both are empty.
double iou(const Mask& a, const Mask& b);

struct LossWeights {
  double dice = 1.0;
  double ce = 1.0;
};

inline constexpr double kProbabilityEpsilon = 1e-7;

/// weights.dice * (1 - softDice(pred, gt)) + weights.ce * mean BCE(pred, gt),
/// with probabilities clamped to [eps, 1 - eps] inside the log terms.
double composite_loss(const Mask& pred, const Mask& gt, LossWeights weights = {});

}  // namespace fuas::seg
