#include <random>

#include "fuas/core/labeling.hpp"
#include "fuas/dosemodel/icc.hpp"

namespace fuas::dose {

Mask jitter_mask(const Mask& m, std::uint64_t seed, double flip_probability) {
  const Grid& g = m.grid();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(flip_probability);
  const auto offsets = neighbour_offsets(Connectivity::Face6);

  Eigen::ArrayXf out = (m.values() >= 0.5f).cast<float>();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool on = m.on(i);
    const Eigen::Array3i c = g.coords(i);
    bool boundary = false;
    for (const auto& d : offsets) {
      const Eigen::Array3i n = c + d;
      if (g.contains(n[0], n[1], n[2]) && m.on(n[0], n[1], n[2]) != on) {
        boundary = true;
        break;
      }
    }
    // Draw for every voxel so the stream does not depend on the mask shape.
    const bool f = flip(rng);
    if (boundary && f) out[static_cast<Eigen::Index>(i)] = on ? 0.0f : 1.0f;
  }
  if (m.count() > 0 && (out >= 0.5f).count() == 0) return m.binarized();
  return Mask(g, std::move(out));
}

}  // namespace fuas::dose
