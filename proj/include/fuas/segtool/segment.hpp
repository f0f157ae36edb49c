#pragma once

#include <optional>
#include <vector>

#include "fuas/core/volume.hpp"
#include "fuas/segtool/prompt.hpp"

namespace fuas::seg {

/// Produces a voxel-wise probability map for a prompted volume. Implementations
/// must be stateless or internally synchronized; a learned model plugs in here.
class SegmentationBackend {
 public:
  virtual ~SegmentationBackend() = default;
  virtual Mask predict(const Volume& v, const Prompt& p) const = 0;
};

/// 1st/99th intensity percentiles of the whole volume.
struct RobustRange {
  double lo = 0;
  double hi = 0;
  double width() const { return hi - lo; }
};
RobustRange robust_range(const Volume& v);

struct RegionGrowingOptions {
  std::optional<double> tau;        // default 0.5 * robust width
  std::optional<double> threshold;  // autonomy detection; default robust midpoint
  std::size_t min_voxels = 8;
};

/// Reference backend: 6-connected region growing around prompt seeds.
class RegionGrowingBackend final : public SegmentationBackend {
 public:
  explicit RegionGrowingBackend(RegionGrowingOptions opts = {}) : opts_(opts) {}
  Mask predict(const Volume& v, const Prompt& p) const override;

  const RegionGrowingOptions& options() const noexcept { return opts_; }

 private:
  RegionGrowingOptions opts_;
};

/// Validates the prompt against the volume, runs the backend, checks output dims.
Mask segment(const Volume& v, const Prompt& p, const SegmentationBackend& backend);

/// One tight box per 6-connected component of {voxel >= threshold} with at
/// least `min_voxels` voxels, largest first.
std::vector<BoxPrompt> autonomy_detect(const Volume& v, double threshold, std::size_t min_voxels);

}  // namespace fuas::seg
