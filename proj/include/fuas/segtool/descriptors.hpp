#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fuas/core/volume.hpp"

namespace fuas::seg {

struct NamedMask {
  std::string name;
  Mask mask;
};

struct OarDistance {
  std::string name;
  std::optional<double> mm;  // nullopt when the OAR or lesion mask is empty
};

/// One 6-connected lesion component; ids are L1..Ln by descending size.
struct LesionDescriptor {
  std::string id;
  double volume_mm3 = 0;
  Eigen::Vector3d centroid_mm = Eigen::Vector3d::Zero();
  Eigen::Array3i bbox_lo = Eigen::Array3i::Zero();
  Eigen::Array3i bbox_hi = Eigen::Array3i::Zero();
  std::vector<OarDistance> oar_distances;

  /// Minimum over OARs; nullopt when no OAR has a finite distance.
  std::optional<double> min_oar_distance() const;
};

/// Geometric serialization of a segmentation result.
struct SegObservation {
  std::string mask_ref;
  double lesion_volume_mm3 = 0;
  Eigen::Vector3d centroid_mm = Eigen::Vector3d::Zero();
  Eigen::Array3i bbox_lo = Eigen::Array3i::Zero();
  Eigen::Array3i bbox_hi = Eigen::Array3i::Zero();
  std::vector<OarDistance> oar_min_distance;
  std::size_t multiplicity = 0;
  std::vector<LesionDescriptor> lesions;

  std::optional<double> min_oar_distance() const;
  /// "SEG: volume_mm3=..; centroid=(..); multiplicity=..; oar_min_distance_mm=.."
  /// followed by one "SEG_LESION:" line per component.
  std::string to_text() const;
};

/// Minimum centre-to-centre distance (mm) between any voxel of `a` and any of `b`.
std::optional<double> min_distance_mm(const Mask& a, const Mask& b);

/// Throws DimMismatch when any mask grid differs from the volume.
SegObservation geometric_descriptors(const Mask& m, const Volume& v, const std::vector<NamedMask>& oars);

}  // namespace fuas::seg
