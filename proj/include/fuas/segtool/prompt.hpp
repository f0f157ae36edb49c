#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fuas/core/volume.hpp"

namespace fuas::seg {

struct AutonomyPrompt {};

struct ClickPoint {
  Eigen::Array3i voxel = Eigen::Array3i::Zero();
  bool positive = true;
};

struct ClickPrompt {
  std::vector<ClickPoint> points;
};

/// Two opposite corners, inclusive; normalized so lo <= hi on every axis.
struct BoxPrompt {
  Eigen::Array3i lo = Eigen::Array3i::Zero();
  Eigen::Array3i hi = Eigen::Array3i::Zero();

  static BoxPrompt from_corners(const Eigen::Array3i& a, const Eigen::Array3i& b) {
    return {a.min(b), a.max(b)};
  }
  Eigen::Array3i center() const { return (lo + hi) / 2; }
  bool contains(const Eigen::Array3i& c) const { return (c >= lo).all() && (c <= hi).all(); }
  bool operator==(const BoxPrompt& o) const { return (lo == o.lo).all() && (hi == o.hi).all(); }
};

using Prompt = std::variant<AutonomyPrompt, ClickPrompt, BoxPrompt>;

/// Throws PromptOutOfBounds or NoPositiveSeed.
void validate_prompt(const Prompt& p, const Grid& grid);

/// Grammar: `auto` | `click:x,y,z,+;x,y,z,-` | `bbox:x0,y0,z0,x1,y1,z1`.
/// Throws MalformedDocument on syntax errors.
Prompt parse_prompt(std::string_view spec);
std::string format_prompt(const Prompt& p);

}  // namespace fuas::seg
