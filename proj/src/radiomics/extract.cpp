#include <cmath>
#include <sstream>

#include "fuas/core/error.hpp"
#include "fuas/core/predicate.hpp"
#include "fuas/radiomics/features.hpp"

namespace fuas::radiomics {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::FirstOrder: return "firstorder";
    case Family::Shape: return "shape";
    case Family::GLCM: return "glcm";
    case Family::GLSZM: return "glszm";
  }
  return "?";
}

FeatureVector::FeatureVector(std::vector<Feature> features) {
  for (auto& f : features) {
    FeatureVector one;
    one.features_.push_back(std::move(f));
    append(one);
  }
}

std::vector<std::string> FeatureVector::names() const {
  std::vector<std::string> out;
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

Eigen::VectorXd FeatureVector::values() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(features_.size()));
  for (std::size_t i = 0; i < features_.size(); ++i) out[static_cast<Eigen::Index>(i)] = features_[i].value;
  return out;
}

double FeatureVector::value(std::string_view name) const {
  for (const auto& f : features_)
    if (f.name == name) return f.value;
  throw Error(ErrorCode::SchemaMismatch, "no feature named " + std::string(name));
}

FeatureVector& FeatureVector::append(const FeatureVector& other) {
  for (const auto& f : other.features_) {
    for (const auto& g : features_)
      if (g.name == f.name) throw Error(ErrorCode::InvalidValue, "duplicate feature " + f.name);
    if (!std::isfinite(f.value)) throw Error(ErrorCode::InvalidValue, "non-finite feature " + f.name);
    features_.push_back(f);
  }
  return *this;
}

std::string FeatureVector::csv_header() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < features_.size(); ++i) os << (i ? "," : "") << features_[i].name;
  return os.str();
}

std::string FeatureVector::csv_row() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < features_.size(); ++i) os << (i ? "," : "") << format_number(features_[i].value);
  return os.str();
}

std::vector<Eigen::Array3i> TextureConfig::unit_offsets_3d() {
  return {{1, 0, 0}, {0, 1, 0},  {0, 0, 1},  {1, 1, 0},  {1, -1, 0}, {1, 0, 1},   {1, 0, -1},
          {0, 1, 1}, {0, 1, -1}, {1, 1, 1},  {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
}

void TextureConfig::validate() const {
  if (n_bins < 2) throw Error(ErrorCode::InvalidValue, "n_bins must be >= 2");
  if (offsets.empty()) throw Error(ErrorCode::InvalidValue, "no texture offsets");
  for (const auto& o : offsets)
    if ((o == 0).all()) throw Error(ErrorCode::InvalidValue, "zero texture offset");
}

FeatureVector extract(const Volume& v, const Mask& m, const TextureConfig& cfg) {
  FeatureVector out = first_order(v, m, cfg.n_bins);
  out.append(shape(m));
  out.append(glcm(v, m, cfg));
  out.append(glszm(v, m, cfg));
  return out;
}

std::vector<std::string> feature_names() {
  return {"firstorder_mean",
          "firstorder_variance",
          "firstorder_skewness",
          "firstorder_energy",
          "firstorder_entropy",
          "firstorder_p10",
          "firstorder_p90",
          "shape_volume_mm3",
          "shape_surface_area_mm2",
          "shape_sphericity",
          "shape_sa_to_v",
          "glcm_contrast",
          "glcm_correlation",
          "glcm_energy",
          "glcm_homogeneity",
          "glszm_small_area_emphasis",
          "glszm_large_area_emphasis",
          "glszm_gray_level_nonuniformity",
          "glszm_zone_entropy"};
}

}  // namespace fuas::radiomics
