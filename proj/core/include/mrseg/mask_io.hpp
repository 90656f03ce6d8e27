#pragma once

#include <filesystem>
#include <variant>

#include "mrseg/grid.hpp"

namespace mrseg {

// MRSG v1 mask file, little-endian:
//   bytes 0-7   magic "MRSEGV1\0"
//   byte  8     dtype: 0 = binary u8, 1 = probability f32
//   bytes 9-20  dims, three u32
//   bytes 21-44 spacing, three f64 (mm)
//   payload     nx*ny*nz elements, x-fastest
inline constexpr std::size_t kMrsgHeaderSize = 45;

using Grid = std::variant<VoxelMask, ProbabilityGrid>;

Grid load_mask(const std::filesystem::path& path);
void save_mask(const VoxelMask& mask, const std::filesystem::path& path);
void save_mask(const ProbabilityGrid& grid, const std::filesystem::path& path);
void save_mask(const Grid& grid, const std::filesystem::path& path);

// Convenience wrapper: loads and requires a binary mask.
VoxelMask load_binary_mask(const std::filesystem::path& path);

}  // namespace mrseg
