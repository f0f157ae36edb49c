#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fuas/core/volume.hpp"

namespace fuas {

enum class Connectivity { Face6 = 6, Full26 = 26 };

/// Neighbour offsets for the connectivity, excluding the origin.
std::span<const Eigen::Array3i> neighbour_offsets(Connectivity c);

struct Regions {
  std::vector<std::int32_t> labels;  // 0 = excluded; regions numbered 1..n in scan order
  std::vector<std::size_t> sizes;    // sizes[k] is the size of region k+1
  std::vector<int> classes;          // class value of each region

  std::size_t count() const noexcept { return sizes.size(); }
};

/// Groups connected voxels sharing the same class value; negative classes are excluded.
Regions label_regions(const Grid& grid, std::span<const int> classes, Connectivity conn);

/// Connected components of the mask foreground (binarized at 0.5).
Regions label_components(const Mask& mask, Connectivity conn);

}  // namespace fuas
