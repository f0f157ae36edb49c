#include "fuas/segtool/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fuas/core/error.hpp"
#include "fuas/core/labeling.hpp"
#include "fuas/core/stats.hpp"

namespace fuas::seg {

namespace {

// Grows from the seeds over 6-neighbours whose intensity is within tau of the
// seed mean, optionally confined to a box.
std::vector<bool> grow(const Volume& v, const std::vector<Eigen::Array3i>& seeds, double tau,
                       const BoxPrompt* clip) {
  const Grid& g = v.grid();
  std::vector<bool> in(g.size(), false);
  if (seeds.empty()) return in;
  double mean = 0;
  for (const auto& s : seeds) mean += v.at(s[0], s[1], s[2]);
  mean /= static_cast<double>(seeds.size());

  std::vector<std::size_t> stack;
  for (const auto& s : seeds) {
    const auto i = g.index(s[0], s[1], s[2]);
    if (!in[i]) {
      in[i] = true;
      stack.push_back(i);
    }
  }
  const auto offsets = neighbour_offsets(Connectivity::Face6);
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const Eigen::Array3i c = g.coords(i);
    for (const auto& d : offsets) {
      const Eigen::Array3i n = c + d;
      if (!g.contains(n[0], n[1], n[2])) continue;
      if (clip != nullptr && !clip->contains(n)) continue;
      const auto j = g.index(n[0], n[1], n[2]);
      if (in[j] || std::abs(static_cast<double>(v.voxels()[static_cast<Eigen::Index>(j)]) - mean) > tau) continue;
      in[j] = true;
      stack.push_back(j);
    }
  }
  return in;
}

Eigen::ArrayXf to_array(const std::vector<bool>& in) {
  Eigen::ArrayXf out(static_cast<Eigen::Index>(in.size()));
  for (std::size_t i = 0; i < in.size(); ++i) out[static_cast<Eigen::Index>(i)] = in[i] ? 1.0f : 0.0f;
  return out;
}

}  // namespace

RobustRange robust_range(const Volume& v) {
  std::vector<double> xs(v.voxels().data(), v.voxels().data() + v.voxels().size());
  RobustRange r;
  r.lo = percentile_inplace(xs, 1.0);
  r.hi = percentile_inplace(xs, 99.0);
  return r;
}

Mask RegionGrowingBackend::predict(const Volume& v, const Prompt& p) const {
  const RobustRange range = (opts_.tau && opts_.threshold) ? RobustRange{} : robust_range(v);
  const double tau = opts_.tau.value_or(0.5 * range.width());

  if (const auto* click = std::get_if<ClickPrompt>(&p)) {
    std::vector<Eigen::Array3i> pos, neg;
    for (const auto& pt : click->points) (pt.positive ? pos : neg).push_back(pt.voxel);
    auto in = grow(v, pos, tau, nullptr);
    const auto out = grow(v, neg, tau, nullptr);
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = in[i] && !out[i];
    return Mask(v.grid(), to_array(in));
  }
  if (const auto* box = std::get_if<BoxPrompt>(&p)) {
    return Mask(v.grid(), to_array(grow(v, {box->center()}, tau, box)));
  }

  const double threshold = opts_.threshold.value_or(range.lo + 0.5 * range.width());
  std::vector<bool> united(v.grid().size(), false);
  for (const auto& box : autonomy_detect(v, threshold, opts_.min_voxels)) {
    const auto in = grow(v, {box.center()}, tau, &box);
    for (std::size_t i = 0; i < united.size(); ++i) united[i] = united[i] || in[i];
  }
  return Mask(v.grid(), to_array(united));
}

Mask segment(const Volume& v, const Prompt& p, const SegmentationBackend& backend) {
  validate_prompt(p, v.grid());
  Mask m = backend.predict(v, p);
  require_same_dims(v.grid(), m.grid(), "segmentation output");
  return m;
}

std::vector<BoxPrompt> autonomy_detect(const Volume& v, double threshold, std::size_t min_voxels) {
  const Grid& g = v.grid();
  std::vector<int> classes(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    classes[i] = v.voxels()[static_cast<Eigen::Index>(i)] >= threshold ? 0 : -1;
  const Regions regions = label_regions(g, classes, Connectivity::Face6);

  std::vector<BoxPrompt> boxes(regions.count(), BoxPrompt{g.dims() - 1, Eigen::Array3i::Zero()});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto label = regions.labels[i];
    if (label == 0) continue;
    auto& b = boxes[static_cast<std::size_t>(label - 1)];
    const Eigen::Array3i c = g.coords(i);
    b.lo = b.lo.min(c);
    b.hi = b.hi.max(c);
  }
  std::vector<std::size_t> order(regions.count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return regions.sizes[a] > regions.sizes[b]; });
  std::vector<BoxPrompt> out;
  for (auto k : order)
    if (regions.sizes[k] >= min_voxels) out.push_back(boxes[k]);
  return out;
}

}  // namespace fuas::seg
