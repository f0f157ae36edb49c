#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace fuas {

/// Voxel lattice geometry. Index ordering is x-fastest: i = x + nx * (y + ny * z).
class Grid {
 public:
  Grid() = default;
  /// Spacing is rounded through f32 so in-memory geometry always equals what
  /// the on-disk formats can represent.
  Grid(const Eigen::Array3i& dims, const Eigen::Array3d& spacing_mm);

  const Eigen::Array3i& dims() const noexcept { return dims_; }
  const Eigen::Array3d& spacing() const noexcept { return spacing_; }
  int nx() const noexcept { return dims_[0]; }
  int ny() const noexcept { return dims_[1]; }
  int nz() const noexcept { return dims_[2]; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  double voxel_volume() const noexcept { return spacing_.prod(); }

  bool contains(int x, int y, int z) const noexcept {
    return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
  }
  std::size_t index(int x, int y, int z) const noexcept {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_[1]) * z);
  }
  Eigen::Array3i coords(std::size_t i) const noexcept {
    const auto nx = static_cast<std::size_t>(dims_[0]);
    const auto ny = static_cast<std::size_t>(dims_[1]);
    return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
            static_cast<int>(i / (nx * ny))};
  }
  /// Voxel-center position in mm (origin at the center of voxel (0,0,0)).
  Eigen::Vector3d position_mm(const Eigen::Array3i& c) const noexcept {
    return (c.cast<double>() * spacing_).matrix();
  }

  bool operator==(const Grid& o) const noexcept {
    return (dims_ == o.dims_).all() && (spacing_ == o.spacing_).all();
  }

 private:
  Eigen::Array3i dims_ = Eigen::Array3i::Zero();
  Eigen::Array3d spacing_ = Eigen::Array3d::Ones();
};

/// Scalar intensity volume; immutable once constructed.
class Volume {
 public:
  Volume() = default;
  /// Throws NonPositiveDim, DimMismatch (voxel count) or InvalidValue (NaN/Inf).
  Volume(Grid grid, Eigen::ArrayXf voxels);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::ArrayXf& voxels() const noexcept { return voxels_; }
  float at(int x, int y, int z) const noexcept { return voxels_[static_cast<Eigen::Index>(grid_.index(x, y, z))]; }

  bool operator==(const Volume& o) const noexcept {
    return grid_ == o.grid_ && voxels_.size() == o.voxels_.size() && (voxels_ == o.voxels_).all();
  }

 private:
  Grid grid_;
  Eigen::ArrayXf voxels_;
};

/// Binary or probability mask. Values are clamped into [0,1] at construction.
class Mask {
 public:
  Mask() = default;
  Mask(Grid grid, Eigen::ArrayXf probabilities);
  static Mask empty_like(const Grid& grid);
  /// Builds a mask that must share `v`'s grid; throws DimMismatch otherwise.
  static Mask for_volume(const Volume& v, Eigen::ArrayXf probabilities);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::ArrayXf& values() const noexcept { return values_; }
  bool on(std::size_t i) const noexcept { return values_[static_cast<Eigen::Index>(i)] >= 0.5f; }
  bool on(int x, int y, int z) const noexcept { return on(grid_.index(x, y, z)); }

  /// Thresholds at 0.5.
  Mask binarized() const;
  bool is_binary() const noexcept;
  std::size_t count() const noexcept;

  bool operator==(const Mask& o) const noexcept {
    return grid_ == o.grid_ && values_.size() == o.values_.size() && (values_ == o.values_).all();
  }

 private:
  Grid grid_;
  Eigen::ArrayXf values_;
};

/// Throws DimMismatch when the two grids disagree on dims.
void require_same_dims(const Grid& a, const Grid& b, const char* what);

}  // namespace fuas
