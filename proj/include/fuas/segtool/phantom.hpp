#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fuas/core/volume.hpp"

namespace fuas::seg {

struct Ellipsoid {
  Eigen::Vector3d center_mm = Eigen::Vector3d::Zero();
  Eigen::Vector3d semi_axes_mm = Eigen::Vector3d::Ones();
  double intensity = 1.0;

  bool contains(const Eigen::Vector3d& p) const {
    return ((p - center_mm).array() / semi_axes_mm.array()).square().sum() <= 1.0;
  }
};

struct OrganAtRisk {
  std::string name;
  Ellipsoid shape;
};

/// Synthetic volume description: ellipsoidal lesions over a uniform background,
/// optional organs at risk, additive Gaussian noise.
struct PhantomSpec {
  Grid grid{Eigen::Array3i(32, 32, 32), Eigen::Array3d::Ones()};
  std::vector<Ellipsoid> lesions;
  std::vector<OrganAtRisk> oars;
  double background = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct Phantom {
  Volume volume;
  Mask truth;  // union of lesion ellipsoids
  std::vector<std::pair<std::string, Mask>> oars;
};

/// Deterministic for a fixed seed. Throws EllipsoidOutOfBounds when an
/// ellipsoid's extent leaves the volume, InvalidValue for bad axes or sigma.
Phantom make_phantom(const PhantomSpec& spec);

PhantomSpec parse_phantom_spec(std::string_view json_text);
std::string serialize_phantom_spec(const PhantomSpec& spec);

}  // namespace fuas::seg
