#pragma once

#include <limits>
#include <vector>

#include "mrseg/grid.hpp"

namespace mrseg {

// Exact Euclidean distance field of a mask, spacing-weighted (mm).
// Distances run from each voxel center to the nearest set-voxel center;
// an empty mask yields +infinity everywhere.
struct DistanceField {
    Dims dims;
    Spacing spacing;
    std::vector<double> dist_mm;
    // Flat index of a nearest set voxel per voxel, or npos when none exists.
    std::vector<std::size_t> nearest;

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

DistanceField distance_transform(const VoxelMask& mask);

// Surface voxels: set voxels with at least one face-adjacent unset or
// out-of-bounds neighbor (6-connectivity; the grid boundary counts as
// background).
struct SurfaceSet {
    std::vector<std::array<std::uint32_t, 3>> voxels;
};

SurfaceSet surface_voxels(const VoxelMask& mask);

// Mask whose set voxels are exactly the surface of the input.
VoxelMask surface_mask(const VoxelMask& mask);

}  // namespace mrseg
