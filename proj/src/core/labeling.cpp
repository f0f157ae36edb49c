#include "fuas/core/labeling.hpp"

#include <array>

#include "fuas/core/error.hpp"

namespace fuas {

namespace {

std::array<Eigen::Array3i, 6> make_face6() {
  return {Eigen::Array3i(1, 0, 0), Eigen::Array3i(-1, 0, 0), Eigen::Array3i(0, 1, 0),
          Eigen::Array3i(0, -1, 0), Eigen::Array3i(0, 0, 1), Eigen::Array3i(0, 0, -1)};
}

std::array<Eigen::Array3i, 26> make_full26() {
  std::array<Eigen::Array3i, 26> out;
  std::size_t k = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx != 0 || dy != 0 || dz != 0) out[k++] = Eigen::Array3i(dx, dy, dz);
  return out;
}

}  // namespace

std::span<const Eigen::Array3i> neighbour_offsets(Connectivity c) {
  static const auto face6 = make_face6();
  static const auto full26 = make_full26();
  if (c == Connectivity::Face6) return face6;
  return full26;
}

Regions label_regions(const Grid& grid, std::span<const int> classes, Connectivity conn) {
  if (classes.size() != grid.size()) throw Error(ErrorCode::DimMismatch, "class map size differs from grid");
  Regions r;
  r.labels.assign(grid.size(), 0);
  const auto offsets = neighbour_offsets(conn);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < grid.size(); ++start) {
    if (classes[start] < 0 || r.labels[start] != 0) continue;
    const int cls = classes[start];
    const auto label = static_cast<std::int32_t>(r.sizes.size() + 1);
    std::size_t size = 0;
    r.labels[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++size;
      const Eigen::Array3i c = grid.coords(i);
      for (const auto& d : offsets) {
        const Eigen::Array3i n = c + d;
        if (!grid.contains(n[0], n[1], n[2])) continue;
        const std::size_t j = grid.index(n[0], n[1], n[2]);
        if (r.labels[j] != 0 || classes[j] != cls) continue;
        r.labels[j] = label;
        stack.push_back(j);
      }
    }
    r.sizes.push_back(size);
    r.classes.push_back(cls);
  }
  return r;
}

Regions label_components(const Mask& mask, Connectivity conn) {
  std::vector<int> classes(mask.grid().size());
  for (std::size_t i = 0; i < classes.size(); ++i) classes[i] = mask.on(i) ? 0 : -1;
  return label_regions(mask.grid(), classes, conn);
}

}  // namespace fuas
