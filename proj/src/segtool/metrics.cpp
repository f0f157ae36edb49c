#include "fuas/segtool/metrics.hpp"

#include <cmath>

#include "fuas/core/error.hpp"

namespace fuas::seg {

namespace {

struct Overlap {
  double a = 0, b = 0, both = 0;
};

Overlap overlap(const Mask& a, const Mask& b) {
  require_same_dims(a.grid(), b.grid(), "overlap");
  const auto ina = (a.values() >= 0.5f);
  const auto inb = (b.values() >= 0.5f);
  return {static_cast<double>(ina.count()), static_cast<double>(inb.count()),
          static_cast<double>((ina && inb).count())};
}

}  // namespace

double dice(const Mask& a, const Mask& b) {
  const auto o = overlap(a, b);
  if (o.a + o.b == 0) return 1.0;
  return 2.0 * o.both / (o.a + o.b);
}

double iou(const Mask& a, const Mask& b) {
  const auto o = overlap(a, b);
  const double uni = o.a + o.b - o.both;
  if (uni == 0) return 1.0;
  return o.both / uni;
}

double composite_loss(const Mask& pred, const Mask& gt, LossWeights w) {
  require_same_dims(pred.grid(), gt.grid(), "composite_loss");
  if (!gt.is_binary()) throw Error(ErrorCode::InvalidValue, "ground truth mask must be binary");
  const Eigen::ArrayXd p = pred.values().cast<double>();
  const Eigen::ArrayXd g = gt.values().cast<double>();

  const double denom = p.sum() + g.sum();
  const double soft_dice = denom == 0 ? 1.0 : 2.0 * (p * g).sum() / denom;

  const Eigen::ArrayXd pc = p.max(kProbabilityEpsilon).min(1.0 - kProbabilityEpsilon);
  const double ce = -(g * pc.log() + (1.0 - g) * (1.0 - pc).log()).mean();
  return w.dice * (1.0 - soft_dice) + w.ce * ce;
}

}  // namespace fuas::seg
