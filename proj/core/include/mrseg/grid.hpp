#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mrseg/errors.hpp"

namespace mrseg {

// Grid dimensions, x-fastest voxel order throughout.
struct Dims {
    std::uint32_t nx = 0, ny = 0, nz = 0;

    std::size_t count() const { return std::size_t(nx) * ny * nz; }
    bool operator==(const Dims&) const = default;
};

// Physical voxel spacing in mm along each axis.
struct Spacing {
    double sx = 1.0, sy = 1.0, sz = 1.0;

    double voxel_mm3() const { return sx * sy * sz; }
    bool operator==(const Spacing&) const = default;
};

namespace detail {
void check_geometry(const Dims& dims, const Spacing& spacing, std::size_t data_len);
}

// Binary 3D voxel grid with anisotropic spacing; the unit of all
// segmentation comparison. Immutable after construction.
class VoxelMask {
public:
    VoxelMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> data);

    const Dims& dims() const { return dims_; }
    const Spacing& spacing() const { return spacing_; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return (std::size_t(z) * dims_.ny + y) * dims_.nx + x;
    }
    std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return data_[index(x, y, z)];
    }
    std::size_t set_count() const;
    bool same_geometry(const VoxelMask& other) const {
        return dims_ == other.dims_ && spacing_ == other.spacing_;
    }
    bool operator==(const VoxelMask&) const = default;

private:
    Dims dims_;
    Spacing spacing_;
    std::vector<std::uint8_t> data_;
};

// Float-valued 3D grid in [0,1]; mean-expert maps and MLE estimates.
// Stored as f32 to round-trip the on-disk format bit-exactly.
class ProbabilityGrid {
public:
    ProbabilityGrid(Dims dims, Spacing spacing, std::vector<float> data);

    const Dims& dims() const { return dims_; }
    const Spacing& spacing() const { return spacing_; }
    const std::vector<float>& data() const { return data_; }

    std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return (std::size_t(z) * dims_.ny + y) * dims_.nx + x;
    }
    float at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return data_[index(x, y, z)];
    }
    bool operator==(const ProbabilityGrid&) const = default;

private:
    Dims dims_;
    Spacing spacing_;
    std::vector<float> data_;
};

// Set-voxel count times voxel volume, in milliliters.
double volume_ml(const VoxelMask& mask);

}  // namespace mrseg
