#pragma once

// Slow, direct reference computations used to check the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fuas::oracle {

struct Box {
  int nx = 0, ny = 0, nz = 0;
  double sx = 1, sy = 1, sz = 1;
  std::vector<double> value;  // x fastest
  std::vector<bool> on;

  int idx(int x, int y, int z) const { return x + nx * (y + ny * z); }
  bool inside(int x, int y, int z) const { return x >= 0 && y >= 0 && z >= 0 && x < nx && y < ny && z < nz; }
  bool in_mask(int x, int y, int z) const { return inside(x, y, z) && on[static_cast<std::size_t>(idx(x, y, z))]; }
};

inline double percentile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q / 100.0 * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (xs[hi] - xs[lo]) * (pos - static_cast<double>(lo));
}

inline std::vector<int> levels(const Box& b, int n_bins) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < b.value.size(); ++i)
    if (b.on[i]) {
      lo = std::min(lo, b.value[i]);
      hi = std::max(hi, b.value[i]);
    }
  std::vector<int> out(b.value.size(), -1);
  for (std::size_t i = 0; i < b.value.size(); ++i) {
    if (!b.on[i]) continue;
    if (hi - lo <= 0) {
      out[i] = 0;
      continue;
    }
    int bin = static_cast<int>(std::floor((b.value[i] - lo) / (hi - lo) * n_bins));
    out[i] = std::max(0, std::min(n_bins - 1, bin));
  }
  return out;
}

/// All 19 features by direct loops, keyed by name.
inline std::map<std::string, double> radiomics(const Box& b, int n_bins) {
  std::map<std::string, double> f;
  std::vector<double> xs;
  for (std::size_t i = 0; i < b.value.size(); ++i)
    if (b.on[i]) xs.push_back(b.value[i]);
  const double n = static_cast<double>(xs.size());

  double mean = 0, energy = 0;
  for (double x : xs) {
    mean += x;
    energy += x * x;
  }
  mean /= n;
  double var = 0, m3 = 0;
  for (double x : xs) {
    var += (x - mean) * (x - mean);
    m3 += (x - mean) * (x - mean) * (x - mean);
  }
  var /= n;
  m3 /= n;
  f["firstorder_mean"] = mean;
  f["firstorder_variance"] = var;
  f["firstorder_skewness"] = var > 0 ? m3 / std::pow(var, 1.5) : 0.0;
  f["firstorder_energy"] = energy;
  const auto lv = levels(b, n_bins);
  std::map<int, double> hist;
  for (int l : lv)
    if (l >= 0) hist[l] += 1;
  double ent = 0;
  for (const auto& [l, c] : hist) ent -= (c / n) * std::log2(c / n);
  f["firstorder_entropy"] = ent;
  f["firstorder_p10"] = percentile(xs, 10);
  f["firstorder_p90"] = percentile(xs, 90);

  double area = 0;
  const double face[3] = {b.sy * b.sz, b.sx * b.sz, b.sx * b.sy};
  for (int z = 0; z < b.nz; ++z)
    for (int y = 0; y < b.ny; ++y)
      for (int x = 0; x < b.nx; ++x) {
        if (!b.in_mask(x, y, z)) continue;
        if (!b.in_mask(x - 1, y, z)) area += face[0];
        if (!b.in_mask(x + 1, y, z)) area += face[0];
        if (!b.in_mask(x, y - 1, z)) area += face[1];
        if (!b.in_mask(x, y + 1, z)) area += face[1];
        if (!b.in_mask(x, y, z - 1)) area += face[2];
        if (!b.in_mask(x, y, z + 1)) area += face[2];
      }
  const double volume = n * b.sx * b.sy * b.sz;
  f["shape_volume_mm3"] = volume;
  f["shape_surface_area_mm2"] = area;
  f["shape_sphericity"] = std::cbrt(std::numbers::pi) * std::pow(6 * volume, 2.0 / 3.0) / area;
  f["shape_sa_to_v"] = area / volume;

  // GLCM over the 13 displacements whose first nonzero (dz, dy, dx) component is positive.
  double contrast = 0, corr = 0, genergy = 0, homog = 0;
  int used = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const bool positive = dz > 0 || (dz == 0 && (dy > 0 || (dy == 0 && dx > 0)));
        if (!positive) continue;
        std::vector<std::vector<double>> c(n_bins, std::vector<double>(n_bins, 0.0));
        double total = 0;
        for (int z = 0; z < b.nz; ++z)
          for (int y = 0; y < b.ny; ++y)
            for (int x = 0; x < b.nx; ++x) {
              if (!b.in_mask(x, y, z) || !b.in_mask(x + dx, y + dy, z + dz)) continue;
              const int i = lv[static_cast<std::size_t>(b.idx(x, y, z))];
              const int j = lv[static_cast<std::size_t>(b.idx(x + dx, y + dy, z + dz))];
              c[i][j] += 1;
              c[j][i] += 1;
              total += 2;
            }
        if (total == 0) continue;
        ++used;
        std::vector<double> px(n_bins, 0.0), py(n_bins, 0.0);
        for (int i = 0; i < n_bins; ++i)
          for (int j = 0; j < n_bins; ++j) {
            c[i][j] /= total;
            px[i] += c[i][j];
            py[j] += c[i][j];
          }
        double mx = 0, my = 0, vx = 0, vy = 0;
        for (int i = 0; i < n_bins; ++i) {
          mx += i * px[i];
          my += i * py[i];
        }
        for (int i = 0; i < n_bins; ++i) {
          vx += (i - mx) * (i - mx) * px[i];
          vy += (i - my) * (i - my) * py[i];
        }
        double cov = 0;
        for (int i = 0; i < n_bins; ++i)
          for (int j = 0; j < n_bins; ++j) {
            const double p = c[i][j];
            contrast += (i - j) * (i - j) * p;
            genergy += p * p;
            homog += p / (1.0 + std::abs(i - j));
            cov += (i - mx) * (j - my) * p;
          }
        if (vx > 0 && vy > 0) corr += cov / std::sqrt(vx * vy);
      }
  f["glcm_contrast"] = contrast / used;
  f["glcm_correlation"] = corr / used;
  f["glcm_energy"] = genergy / used;
  f["glcm_homogeneity"] = homog / used;

  // Zones: breadth-first flood fill over 26-neighbours of equal level.
  std::vector<bool> seen(b.value.size(), false);
  std::vector<std::pair<int, int>> zones;  // (level, size)
  for (int z = 0; z < b.nz; ++z)
    for (int y = 0; y < b.ny; ++y)
      for (int x = 0; x < b.nx; ++x) {
        const auto start = static_cast<std::size_t>(b.idx(x, y, z));
        if (!b.on[start] || seen[start]) continue;
        const int level = lv[start];
        int size = 0;
        std::deque<std::array<int, 3>> q{{x, y, z}};
        seen[start] = true;
        while (!q.empty()) {
          const auto p = q.front();
          q.pop_front();
          ++size;
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                const int X = p[0] + dx, Y = p[1] + dy, Z = p[2] + dz;
                if (!b.in_mask(X, Y, Z)) continue;
                const auto k = static_cast<std::size_t>(b.idx(X, Y, Z));
                if (seen[k] || lv[k] != level) continue;
                seen[k] = true;
                q.push_back({X, Y, Z});
              }
        }
        zones.emplace_back(level, size);
      }
  const double nzn = static_cast<double>(zones.size());
  double sae = 0, lae = 0;
  std::map<int, double> per_level;
  std::map<std::pair<int, int>, double> cells;
  for (const auto& [l, s] : zones) {
    sae += 1.0 / (double(s) * s);
    lae += double(s) * s;
    per_level[l] += 1;
    cells[{l, s}] += 1;
  }
  double gln = 0, zent = 0;
  for (const auto& [l, c] : per_level) gln += c * c;
  for (const auto& [cell, c] : cells) zent -= (c / nzn) * std::log2(c / nzn);
  f["glszm_small_area_emphasis"] = sae / nzn;
  f["glszm_large_area_emphasis"] = lae / nzn;
  f["glszm_gray_level_nonuniformity"] = gln / nzn;
  f["glszm_zone_entropy"] = zent;
  return f;
}

/// Largest KKT violation of a lasso solution on the standardized problem
/// (population-std columns, centred response).
inline double lasso_kkt_residual(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                 double lambda) {
  const auto n = f.rows();
  Eigen::MatrixXd z = f;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    double mean = 0, var = 0;
    for (Eigen::Index i = 0; i < n; ++i) mean += f(i, j);
    mean /= n;
    for (Eigen::Index i = 0; i < n; ++i) var += (f(i, j) - mean) * (f(i, j) - mean);
    const double sd = std::sqrt(var / n);
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = (f(i, j) - mean) / sd;
  }
  double ybar = 0;
  for (Eigen::Index i = 0; i < n; ++i) ybar += y[i];
  ybar /= n;
  double worst = 0;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    double g = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double fit = 0;
      for (Eigen::Index k = 0; k < f.cols(); ++k) fit += z(i, k) * w[k];
      g += z(i, j) * (y[i] - ybar - fit);
    }
    g /= n;
    const double r = w[j] != 0 ? std::abs(g - lambda * (w[j] > 0 ? 1 : -1)) : std::max(0.0, std::abs(g) - lambda);
    worst = std::max(worst, r);
  }
  return worst;
}

/// Ordinary least squares with intercept via the normal equations; element 0 is the intercept.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& f, const Eigen::VectorXd& y) {
  Eigen::MatrixXd x(f.rows(), f.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(f.cols()) = f;
  return (x.transpose() * x).ldlt().solve(x.transpose() * y);
}

/// AUC by comparing every positive with every negative.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<int>& label) {
  std::uint64_t wins = 0, ties = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < s.size(); ++i) (label[i] ? pos : neg) += 1;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!label[i] || label[j]) continue;
      if (s[i] > s[j]) ++wins;
      else if (s[i] == s[j]) ++ties;
    }
  return static_cast<double>(2 * wins + ties) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

/// ICC(1,1) from the one-way ANOVA mean squares.
inline double icc11(const std::vector<std::vector<double>>& r) {
  const double n = static_cast<double>(r.size()), k = static_cast<double>(r[0].size());
  double grand = 0;
  for (const auto& row : r)
    for (double v : row) grand += v;
  grand /= n * k;
  double ssb = 0, ssw = 0;
  for (const auto& row : r) {
    double m = 0;
    for (double v : row) m += v;
    m /= k;
    ssb += k * (m - grand) * (m - grand);
    for (double v : row) ssw += (v - m) * (v - m);
  }
  const double msb = ssb / (n - 1), msw = ssw / (n * (k - 1));
  return (msb - msw) / (msb + (k - 1) * msw);
}

/// Cosine against every candidate, rounded to 1e-12, sorted by score then id, truncated to k.
inline std::vector<std::pair<std::string, double>> top_k(const Eigen::VectorXd& q,
                                                         const std::vector<std::pair<std::string, Eigen::VectorXd>>& docs,
                                                         std::size_t k) {
  std::vector<std::pair<std::string, double>> all;
  for (const auto& [id, v] : docs) {
    double dot = 0, nq = 0, nv = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      dot += q[i] * v[i];
      nq += q[i] * q[i];
      nv += v[i] * v[i];
    }
    all.emplace_back(id, std::round(dot / std::sqrt(nq * nv) * 1e12) / 1e12);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

inline std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

}  // namespace fuas::oracle
