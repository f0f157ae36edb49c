#include "fuas/core/volume.hpp"

#include <cmath>
#include <sstream>

#include "fuas/core/error.hpp"

namespace fuas {

namespace {

std::string dims_str(const Eigen::Array3i& d) {
  std::ostringstream os;
  os << d[0] << "x" << d[1] << "x" << d[2];
  return os.str();
}

}  // namespace

Grid::Grid(const Eigen::Array3i& dims, const Eigen::Array3d& spacing_mm) : dims_(dims) {
  if ((dims <= 0).any()) throw Error(ErrorCode::NonPositiveDim, "dims " + dims_str(dims));
  for (int a = 0; a < 3; ++a) {
    volatile float f = static_cast<float>(spacing_mm[a]);
    spacing_[a] = f;
  }
  if (!(spacing_ > 0.0).all() || !spacing_.isFinite().all())
    throw Error(ErrorCode::InvalidValue, "spacing must be finite and > 0");
}

Volume::Volume(Grid grid, Eigen::ArrayXf voxels) : grid_(std::move(grid)), voxels_(std::move(voxels)) {
  if ((grid_.dims() <= 0).any()) throw Error(ErrorCode::NonPositiveDim, "dims " + dims_str(grid_.dims()));
  if (static_cast<std::size_t>(voxels_.size()) != grid_.size())
    throw Error(ErrorCode::DimMismatch, "voxel count does not match dims " + dims_str(grid_.dims()));
  if (!voxels_.isFinite().all()) throw Error(ErrorCode::InvalidValue, "volume contains NaN/Inf");
}

Mask::Mask(Grid grid, Eigen::ArrayXf probabilities) : grid_(std::move(grid)), values_(std::move(probabilities)) {
  if ((grid_.dims() <= 0).any()) throw Error(ErrorCode::NonPositiveDim, "dims " + dims_str(grid_.dims()));
  if (static_cast<std::size_t>(values_.size()) != grid_.size())
    throw Error(ErrorCode::DimMismatch, "mask voxel count does not match dims " + dims_str(grid_.dims()));
  if (!values_.isFinite().all()) throw Error(ErrorCode::InvalidValue, "mask contains NaN/Inf");
  values_ = values_.max(0.0f).min(1.0f);
}

Mask Mask::empty_like(const Grid& grid) {
  return Mask(grid, Eigen::ArrayXf::Zero(static_cast<Eigen::Index>(grid.size())));
}

Mask Mask::for_volume(const Volume& v, Eigen::ArrayXf probabilities) {
  if (static_cast<std::size_t>(probabilities.size()) != v.grid().size())
    throw Error(ErrorCode::DimMismatch, "mask size differs from volume " + dims_str(v.grid().dims()));
  return Mask(v.grid(), std::move(probabilities));
}

Mask Mask::binarized() const {
  return Mask(grid_, (values_ >= 0.5f).cast<float>());
}

bool Mask::is_binary() const noexcept {
  return ((values_ == 0.0f) || (values_ == 1.0f)).all();
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>((values_ >= 0.5f).count());
}

void require_same_dims(const Grid& a, const Grid& b, const char* what) {
  if ((a.dims() != b.dims()).any())
    throw Error(ErrorCode::DimMismatch,
                std::string(what) + ": " + dims_str(a.dims()) + " vs " + dims_str(b.dims()));
}

}  // namespace fuas
