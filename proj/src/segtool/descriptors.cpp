#include "fuas/segtool/descriptors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "fuas/core/labeling.hpp"
#include "fuas/core/stats.hpp"

namespace fuas::seg {

namespace {

// Voxels with at least one 6-neighbour outside the set. The closest pair of two
// disjoint voxel sets always lies on these.
std::vector<Eigen::Array3i> border_voxels(const Mask& m, const std::vector<std::int32_t>* labels, std::int32_t label) {
  const Grid& g = m.grid();
  auto inside = [&](std::size_t i) { return labels ? (*labels)[i] == label : m.on(i); };
  std::vector<Eigen::Array3i> out;
  const auto offsets = neighbour_offsets(Connectivity::Face6);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!inside(i)) continue;
    const Eigen::Array3i c = g.coords(i);
    bool border = false;
    for (const auto& d : offsets) {
      const Eigen::Array3i n = c + d;
      if (!g.contains(n[0], n[1], n[2]) || !inside(g.index(n[0], n[1], n[2]))) {
        border = true;
        break;
      }
    }
    if (border) out.push_back(c);
  }
  return out;
}

std::optional<double> min_distance(const Grid& g, const std::vector<Eigen::Array3i>& a,
                                   const std::vector<Eigen::Array3i>& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a)
    for (const auto& q : b) best = std::min(best, (((p - q).cast<double>()) * g.spacing()).square().sum());
  return std::sqrt(best);
}

std::string distances_text(const std::vector<OarDistance>& ds) {
  if (ds.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += (i ? "," : "") + ds[i].name + ":" + (ds[i].mm ? fixed(*ds[i].mm) : std::string("none"));
  }
  return out;
}

std::string vec_text(const Eigen::Vector3d& v) {
  return "(" + fixed(v.x()) + "," + fixed(v.y()) + "," + fixed(v.z()) + ")";
}

std::optional<double> min_of(const std::vector<OarDistance>& ds) {
  std::optional<double> best;
  for (const auto& d : ds)
    if (d.mm && (!best || *d.mm < *best)) best = d.mm;
  return best;
}

}  // namespace

std::optional<double> LesionDescriptor::min_oar_distance() const { return min_of(oar_distances); }
std::optional<double> SegObservation::min_oar_distance() const { return min_of(oar_min_distance); }

std::string SegObservation::to_text() const {
  std::ostringstream os;
  os << "SEG: volume_mm3=" << fixed(lesion_volume_mm3) << "; centroid=" << vec_text(centroid_mm)
     << "; multiplicity=" << multiplicity << "; oar_min_distance_mm=" << distances_text(oar_min_distance);
  for (const auto& l : lesions) {
    os << "\nSEG_LESION: id=" << l.id << "; volume_mm3=" << fixed(l.volume_mm3) << "; centroid="
       << vec_text(l.centroid_mm) << "; oar_min_distance_mm=" << distances_text(l.oar_distances);
  }
  return os.str();
}

std::optional<double> min_distance_mm(const Mask& a, const Mask& b) {
  require_same_dims(a.grid(), b.grid(), "distance");
  if (a.count() > 0 && ((a.values() >= 0.5f) && (b.values() >= 0.5f)).any()) return 0.0;
  return min_distance(a.grid(), border_voxels(a, nullptr, 0), border_voxels(b, nullptr, 0));
}

SegObservation geometric_descriptors(const Mask& m, const Volume& v, const std::vector<NamedMask>& oars) {
  require_same_dims(v.grid(), m.grid(), "lesion mask");
  for (const auto& o : oars) require_same_dims(v.grid(), o.mask.grid(), "OAR mask");
  const Grid& g = v.grid();

  SegObservation obs;
  const Regions regions = label_components(m, Connectivity::Face6);
  obs.multiplicity = regions.count();

  std::vector<std::vector<Eigen::Array3i>> oar_border;
  for (const auto& o : oars) oar_border.push_back(border_voxels(o.mask, nullptr, 0));

  const std::size_t n = regions.count();
  std::vector<Eigen::Vector3d> sums(n, Eigen::Vector3d::Zero());
  std::vector<Eigen::Array3i> lo(n, g.dims()), hi(n, Eigen::Array3i::Constant(-1));
  Eigen::Vector3d total = Eigen::Vector3d::Zero();
  obs.bbox_lo = g.dims();
  obs.bbox_hi = Eigen::Array3i::Constant(-1);
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto label = regions.labels[i];
    if (label == 0) continue;
    const auto k = static_cast<std::size_t>(label - 1);
    const Eigen::Array3i c = g.coords(i);
    const Eigen::Vector3d p = g.position_mm(c);
    sums[k] += p;
    total += p;
    lo[k] = lo[k].min(c);
    hi[k] = hi[k].max(c);
    obs.bbox_lo = obs.bbox_lo.min(c);
    obs.bbox_hi = obs.bbox_hi.max(c);
    ++count;
  }
  if (count == 0) {
    obs.bbox_lo = obs.bbox_hi = Eigen::Array3i::Zero();
  } else {
    obs.centroid_mm = total / static_cast<double>(count);
  }
  obs.lesion_volume_mm3 = static_cast<double>(count) * g.voxel_volume();

  // overlap[k][o]: lesion k shares a voxel with OAR o (distance 0).
  std::vector<std::vector<bool>> overlap(n, std::vector<bool>(oars.size(), false));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (regions.labels[i] == 0) continue;
    for (std::size_t o = 0; o < oars.size(); ++o)
      if (oars[o].mask.on(i)) overlap[static_cast<std::size_t>(regions.labels[i] - 1)][o] = true;
  }
  auto distance_to = [&](std::size_t o, const std::vector<Eigen::Array3i>& border, bool touches) {
    return touches ? std::optional<double>(0.0) : min_distance(g, border, oar_border[o]);
  };

  const auto all_border = border_voxels(m, nullptr, 0);
  for (std::size_t o = 0; o < oars.size(); ++o) {
    bool touches = false;
    for (std::size_t k = 0; k < n; ++k) touches = touches || overlap[k][o];
    obs.oar_min_distance.push_back({oars[o].name, distance_to(o, all_border, touches)});
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return regions.sizes[a] > regions.sizes[b]; });
  for (std::size_t rank = 0; rank < n; ++rank) {
    const auto k = order[rank];
    LesionDescriptor l;
    l.id = "L" + std::to_string(rank + 1);
    l.volume_mm3 = static_cast<double>(regions.sizes[k]) * g.voxel_volume();
    l.centroid_mm = sums[k] / static_cast<double>(regions.sizes[k]);
    l.bbox_lo = lo[k];
    l.bbox_hi = hi[k];
    const auto border = border_voxels(m, &regions.labels, static_cast<std::int32_t>(k + 1));
    for (std::size_t o = 0; o < oars.size(); ++o)
      l.oar_distances.push_back({oars[o].name, distance_to(o, border, overlap[k][o])});
    obs.lesions.push_back(std::move(l));
  }
  return obs;
}

}  // namespace fuas::seg
