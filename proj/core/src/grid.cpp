#include "mrseg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mrseg {

namespace detail {

void check_geometry(const Dims& dims, const Spacing& spacing, std::size_t data_len) {
    if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0)
        throw FormatError("grid dimensions must all be positive");
    if (!(spacing.sx > 0.0) || !(spacing.sy > 0.0) || !(spacing.sz > 0.0))
        throw ValueError("grid spacing must be positive");
    if (data_len != dims.count())
        throw TruncatedError("payload length does not match dims");
}

}  // namespace detail

VoxelMask::VoxelMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    detail::check_geometry(dims_, spacing_, data_.size());
    for (std::uint8_t v : data_)
        if (v > 1) throw ValueError("mask voxel outside {0,1}");
}

std::size_t VoxelMask::set_count() const {
    return std::size_t(std::count(data_.begin(), data_.end(), std::uint8_t(1)));
}

ProbabilityGrid::ProbabilityGrid(Dims dims, Spacing spacing, std::vector<float> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    detail::check_geometry(dims_, spacing_, data_.size());
    for (float v : data_)
        if (!(v >= 0.0f && v <= 1.0f)) throw ValueError("probability voxel outside [0,1]");
}

double volume_ml(const VoxelMask& mask) {
    return double(mask.set_count()) * mask.spacing().voxel_mm3() / 1000.0;
}

}  // namespace mrseg
