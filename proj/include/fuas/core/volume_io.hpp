#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fuas/core/volume.hpp"

namespace fuas {

using Bytes = std::vector<std::uint8_t>;

/// RVOL layout (little-endian): "RVOL" | u32 version=1 | u32 nx,ny,nz |
/// f32 sx,sy,sz | nx*ny*nz f32 voxels, x-fastest. RMSK is identical with
/// magic "RMSK" and u8 voxels in {0,1}.
inline constexpr std::size_t kVolumeHeaderBytes = 32;
inline constexpr std::uint32_t kVolumeFormatVersion = 1;

Volume load_volume(std::span<const std::uint8_t> bytes);
Bytes save_volume(const Volume& v);

/// Mask payloads must be exactly 0 or 1. Probability masks are binarized at 0.5 on save.
Mask load_mask(std::span<const std::uint8_t> bytes);
Bytes save_mask(const Mask& m);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Volume read_volume(const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);
void write_volume(const std::filesystem::path& path, const Volume& v);
void write_mask(const std::filesystem::path& path, const Mask& m);

}  // namespace fuas
