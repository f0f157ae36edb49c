#include <cmath>
#include <map>

#include "fuas/core/error.hpp"
#include "fuas/core/labeling.hpp"
#include "fuas/radiomics/features.hpp"

namespace fuas::radiomics {

Eigen::MatrixXd glcm_matrix(const std::vector<int>& levels, const Grid& grid, int n_bins,
                            const Eigen::Array3i& offset, bool symmetric) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_bins, n_bins);
  double total = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int a = levels[i];
    if (a < 0) continue;
    const Eigen::Array3i n = grid.coords(i) + offset;
    if (!grid.contains(n[0], n[1], n[2])) continue;
    const int b = levels[grid.index(n[0], n[1], n[2])];
    if (b < 0) continue;
    counts(a, b) += 1;
    total += 1;
    if (symmetric) {
      counts(b, a) += 1;
      total += 1;
    }
  }
  if (total == 0) return {};
  return counts / total;
}

FeatureVector glcm(const Volume& v, const Mask& m, const TextureConfig& cfg) {
  cfg.validate();
  const auto levels = quantize(v, m, cfg.n_bins);
  const Eigen::ArrayXd idx = Eigen::ArrayXd::LinSpaced(cfg.n_bins, 0, cfg.n_bins - 1);
  // |i - j| and (i - j)^2 over the level grid.
  const Eigen::ArrayXXd diff = (idx.replicate(1, cfg.n_bins) - idx.transpose().replicate(cfg.n_bins, 1)).abs();

  double contrast = 0, correlation = 0, energy = 0, homogeneity = 0;
  int used = 0;
  for (const auto& offset : cfg.offsets) {
    const Eigen::MatrixXd p = glcm_matrix(levels, v.grid(), cfg.n_bins, offset, cfg.symmetric);
    if (p.size() == 0) continue;
    ++used;
    const Eigen::ArrayXXd pa = p.array();
    const Eigen::ArrayXd pi = pa.rowwise().sum();
    const Eigen::ArrayXd pj = pa.colwise().sum().transpose();
    const double mu_i = (idx * pi).sum();
    const double mu_j = (idx * pj).sum();
    const double var_i = ((idx - mu_i).square() * pi).sum();
    const double var_j = ((idx - mu_j).square() * pj).sum();

    contrast += (diff.square() * pa).sum();
    energy += pa.square().sum();
    homogeneity += (pa / (1.0 + diff)).sum();
    if (var_i > 0 && var_j > 0) {
      const Eigen::ArrayXXd cov = ((idx - mu_i).matrix() * (idx - mu_j).matrix().transpose()).array() * pa;
      correlation += cov.sum() / std::sqrt(var_i * var_j);
    }
  }
  if (used == 0) throw Error(ErrorCode::NoValidPairs, "no in-mask voxel pairs for any offset");
  const double k = used;
  return FeatureVector({{"glcm_contrast", contrast / k, Family::GLCM},
                        {"glcm_correlation", correlation / k, Family::GLCM},
                        {"glcm_energy", energy / k, Family::GLCM},
                        {"glcm_homogeneity", homogeneity / k, Family::GLCM}});
}

FeatureVector glszm(const Volume& v, const Mask& m, const TextureConfig& cfg) {
  cfg.validate();
  const auto levels = quantize(v, m, cfg.n_bins);
  const Regions zones = label_regions(v.grid(), levels, Connectivity::Full26);
  const auto nz = static_cast<double>(zones.count());

  double sae = 0, lae = 0;
  std::map<int, double> per_level;
  std::map<std::pair<int, std::size_t>, double> matrix;
  for (std::size_t k = 0; k < zones.count(); ++k) {
    const auto s = static_cast<double>(zones.sizes[k]);
    sae += 1.0 / (s * s);
    lae += s * s;
    per_level[zones.classes[k]] += 1.0;
    matrix[{zones.classes[k], zones.sizes[k]}] += 1.0;
  }
  double gln = 0;
  for (const auto& [level, c] : per_level) gln += c * c;
  double entropy = 0;
  for (const auto& [cell, c] : matrix) {
    const double p = c / nz;
    entropy -= p * std::log2(p);
  }
  return FeatureVector({{"glszm_small_area_emphasis", sae / nz, Family::GLSZM},
                        {"glszm_large_area_emphasis", lae / nz, Family::GLSZM},
                        {"glszm_gray_level_nonuniformity", gln / nz, Family::GLSZM},
                        {"glszm_zone_entropy", entropy, Family::GLSZM}});
}

}  // namespace fuas::radiomics
