#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fuas/core/volume.hpp"

namespace fuas::radiomics {

enum class Family { FirstOrder, Shape, GLCM, GLSZM };

std::string_view to_string(Family f);

struct Feature {
  std::string name;
  double value = 0;
  Family family = Family::FirstOrder;
};

/// Named radiomics signature in canonical extraction order.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::vector<Feature> features);

  const std::vector<Feature>& features() const noexcept { return features_; }
  std::size_t size() const noexcept { return features_.size(); }
  std::vector<std::string> names() const;
  Eigen::VectorXd values() const;
  /// Throws SchemaMismatch for an unknown name.
  double value(std::string_view name) const;

  /// Appends `other`; throws InvalidValue on a duplicate name.
  FeatureVector& append(const FeatureVector& other);

  std::string csv_header() const;
  std::string csv_row() const;

 private:
  std::vector<Feature> features_;
};

/// Gray-level quantization and co-occurrence displacements.
struct TextureConfig {
  int n_bins = 32;
  std::vector<Eigen::Array3i> offsets = unit_offsets_3d();
  bool symmetric = true;

  /// The 13 unique unit displacements of a 26-neighbourhood.
  static std::vector<Eigen::Array3i> unit_offsets_3d();
  /// Throws InvalidValue when n_bins < 2, offsets are empty or an offset is zero.
  void validate() const;
};

/// Equal-width bins over the masked intensity range; -1 outside the mask.
/// A constant region maps entirely to bin 0.
std::vector<int> quantize(const Volume& v, const Mask& m, int n_bins);

/// mean, variance, skewness, energy, entropy (bits), p10, p90.
FeatureVector first_order(const Volume& v, const Mask& m, int n_bins = 32);

/// volume_mm3, surface_area_mm2 (exposed voxel faces), sphericity, sa_to_v.
FeatureVector shape(const Mask& m);

/// contrast, correlation, energy, homogeneity averaged over offsets with pairs.
FeatureVector glcm(const Volume& v, const Mask& m, const TextureConfig& cfg = {});

/// Co-occurrence probabilities for one offset; empty when no in-mask pairs exist.
Eigen::MatrixXd glcm_matrix(const std::vector<int>& levels, const Grid& grid, int n_bins,
                            const Eigen::Array3i& offset, bool symmetric);

/// small/large area emphasis, gray-level non-uniformity, zone entropy over
/// 26-connected equal-level zones.
FeatureVector glszm(const Volume& v, const Mask& m, const TextureConfig& cfg = {});

/// FirstOrder ‖ Shape ‖ GLCM ‖ GLSZM.
FeatureVector extract(const Volume& v, const Mask& m, const TextureConfig& cfg = {});

/// Canonical names of the full extraction, independent of input.
std::vector<std::string> feature_names();

}  // namespace fuas::radiomics
