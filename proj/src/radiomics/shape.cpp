#include <cmath>
#include <numbers>

#include "fuas/core/error.hpp"
#include "fuas/radiomics/features.hpp"

namespace fuas::radiomics {

FeatureVector shape(const Mask& m) {
  const Grid& g = m.grid();
  const Eigen::Array3d s = g.spacing();
  // Face normal along axis a has area equal to the product of the other two spacings.
  const Eigen::Array3d face_area(s[1] * s[2], s[0] * s[2], s[0] * s[1]);

  std::size_t count = 0;
  double area = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.on(i)) continue;
    ++count;
    const Eigen::Array3i c = g.coords(i);
    for (int a = 0; a < 3; ++a) {
      for (int step : {-1, 1}) {
        Eigen::Array3i n = c;
        n[a] += step;
        if (!g.contains(n[0], n[1], n[2]) || !m.on(n[0], n[1], n[2])) area += face_area[a];
      }
    }
  }
  if (count == 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground voxels");
  const double volume = static_cast<double>(count) * g.voxel_volume();
  const double sphericity = std::cbrt(std::numbers::pi) * std::pow(6.0 * volume, 2.0 / 3.0) / area;
  return FeatureVector({{"shape_volume_mm3", volume, Family::Shape},
                        {"shape_surface_area_mm2", area, Family::Shape},
                        {"shape_sphericity", sphericity, Family::Shape},
                        {"shape_sa_to_v", area / volume, Family::Shape}});
}

}  // namespace fuas::radiomics
