#include <algorithm>
#include <cmath>
#include <map>

#include "fuas/core/error.hpp"
#include "fuas/core/stats.hpp"
#include "fuas/radiomics/features.hpp"

namespace fuas::radiomics {

namespace {

std::vector<double> masked_values(const Volume& v, const Mask& m) {
  require_same_dims(v.grid(), m.grid(), "radiomics mask");
  std::vector<double> xs;
  for (std::size_t i = 0; i < v.grid().size(); ++i)
    if (m.on(i)) xs.push_back(v.voxels()[static_cast<Eigen::Index>(i)]);
  if (xs.empty()) throw Error(ErrorCode::EmptyMask, "mask has no foreground voxels");
  return xs;
}

}  // namespace

std::vector<int> quantize(const Volume& v, const Mask& m, int n_bins) {
  if (n_bins < 2) throw Error(ErrorCode::InvalidValue, "n_bins must be >= 2");
  const auto xs = masked_values(v, m);
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it, width = *hi_it - *lo_it;
  std::vector<int> levels(v.grid().size(), -1);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!m.on(i)) continue;
    if (width <= 0) {
      levels[i] = 0;
      continue;
    }
    const double x = v.voxels()[static_cast<Eigen::Index>(i)];
    const auto bin = static_cast<int>(std::floor((x - lo) / width * n_bins));
    levels[i] = std::clamp(bin, 0, n_bins - 1);
  }
  return levels;
}

FeatureVector first_order(const Volume& v, const Mask& m, int n_bins) {
  auto xs = masked_values(v, m);
  const auto n = static_cast<double>(xs.size());

  // Central moments accumulated per distinct value so mirrored deviations cancel exactly.
  std::map<double, std::size_t> counts;
  double sum = 0, energy = 0;
  for (double x : xs) {
    ++counts[x];
    sum += x;
    energy += x * x;
  }
  const double mean = sum / n;
  double m2 = 0, m3 = 0;
  for (const auto& [x, c] : counts) {
    const double d = x - mean;
    m2 += static_cast<double>(c) * d * d;
    m3 += static_cast<double>(c) * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  const double skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;

  const auto levels = quantize(v, m, n_bins);
  std::vector<double> hist(static_cast<std::size_t>(n_bins), 0.0);
  for (int l : levels)
    if (l >= 0) hist[static_cast<std::size_t>(l)] += 1.0;
  double entropy = 0;
  for (double h : hist) {
    if (h <= 0) continue;
    const double p = h / n;
    entropy -= p * std::log2(p);
  }

  const double p10 = percentile_inplace(xs, 10.0);
  const double p90 = percentile_inplace(xs, 90.0);

  return FeatureVector({{"firstorder_mean", mean, Family::FirstOrder},
                        {"firstorder_variance", m2, Family::FirstOrder},
                        {"firstorder_skewness", skewness, Family::FirstOrder},
                        {"firstorder_energy", energy, Family::FirstOrder},
                        {"firstorder_entropy", entropy, Family::FirstOrder},
                        {"firstorder_p10", p10, Family::FirstOrder},
                        {"firstorder_p90", p90, Family::FirstOrder}});
}

}  // namespace fuas::radiomics
