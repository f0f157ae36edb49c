#include "fuas/core/volume_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "fuas/core/error.hpp"

namespace fuas {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(Bytes& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

float get_f32(std::span<const std::uint8_t> b, std::size_t off) { return std::bit_cast<float>(get_u32(b, off)); }

Bytes encode_header(const char* magic, const Grid& g) {
  Bytes out;
  out.insert(out.end(), magic, magic + 4);
  put_u32(out, kVolumeFormatVersion);
  for (int a = 0; a < 3; ++a) put_u32(out, static_cast<std::uint32_t>(g.dims()[a]));
  for (int a = 0; a < 3; ++a) put_f32(out, static_cast<float>(g.spacing()[a]));
  return out;
}

Grid decode_header(std::span<const std::uint8_t> b, const char* magic, std::size_t voxel_bytes) {
  if (b.size() < 4 || std::memcmp(b.data(), magic, 4) != 0)
    throw Error(ErrorCode::BadMagic, std::string("expected ") + magic);
  if (b.size() < kVolumeHeaderBytes) throw Error(ErrorCode::TruncatedPayload, "header shorter than 32 bytes");
  const auto version = get_u32(b, 4);
  if (version != kVolumeFormatVersion)
    throw Error(ErrorCode::MalformedDocument, "unsupported version " + std::to_string(version));
  Eigen::Array3i dims;
  std::uint64_t count = 1;
  for (int a = 0; a < 3; ++a) {
    const auto d = get_u32(b, 8 + 4 * a);
    if (d == 0 || d > 0x7fffffffu) throw Error(ErrorCode::NonPositiveDim, "dimension " + std::to_string(d));
    dims[a] = static_cast<int>(d);
    count *= d;
  }
  const std::uint64_t expected = kVolumeHeaderBytes + count * voxel_bytes;
  if (b.size() != expected)
    throw Error(ErrorCode::TruncatedPayload, "declared " + std::to_string(expected) + " bytes, got " +
                                                 std::to_string(b.size()));
  Eigen::Array3d spacing;
  for (int a = 0; a < 3; ++a) spacing[a] = get_f32(b, 20 + 4 * a);
  return Grid(dims, spacing);
}

}  // namespace

Volume load_volume(std::span<const std::uint8_t> bytes) {
  Grid g = decode_header(bytes, "RVOL", 4);
  Eigen::ArrayXf voxels(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < voxels.size(); ++i)
    voxels[i] = get_f32(bytes, kVolumeHeaderBytes + 4 * static_cast<std::size_t>(i));
  return Volume(std::move(g), std::move(voxels));
}

Bytes save_volume(const Volume& v) {
  Bytes out = encode_header("RVOL", v.grid());
  out.reserve(kVolumeHeaderBytes + 4 * v.grid().size());
  for (float f : v.voxels()) put_f32(out, f);
  return out;
}

Mask load_mask(std::span<const std::uint8_t> bytes) {
  Grid g = decode_header(bytes, "RMSK", 1);
  Eigen::ArrayXf values(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto b = bytes[kVolumeHeaderBytes + static_cast<std::size_t>(i)];
    if (b > 1) throw Error(ErrorCode::InvalidValue, "mask voxel value " + std::to_string(b));
    values[i] = static_cast<float>(b);
  }
  return Mask(std::move(g), std::move(values));
}

Bytes save_mask(const Mask& m) {
  Bytes out = encode_header("RMSK", m.grid());
  out.reserve(kVolumeHeaderBytes + m.grid().size());
  for (float p : m.values()) out.push_back(p >= 0.5f ? 1 : 0);
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Volume read_volume(const std::filesystem::path& path) { return load_volume(read_file(path)); }
Mask read_mask(const std::filesystem::path& path) { return load_mask(read_file(path)); }
void write_volume(const std::filesystem::path& path, const Volume& v) { write_file(path, save_volume(v)); }
void write_mask(const std::filesystem::path& path, const Mask& m) { write_file(path, save_mask(m)); }

}  // namespace fuas
