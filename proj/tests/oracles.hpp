#pragma once

// Independent brute-force reference implementations used as test oracles.
// Everything here is written directly from the metric definitions and must
// stay independent of the library's computation paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "mrseg/grid.hpp"
#include "mrseg/rng.hpp"

namespace oracle {

using mrseg::Dims;
using mrseg::Spacing;
using mrseg::VoxelMask;

inline std::vector<std::array<int, 3>> set_voxels(const VoxelMask& m) {
    std::vector<std::array<int, 3>> out;
    for (std::uint32_t z = 0; z < m.dims().nz; ++z)
        for (std::uint32_t y = 0; y < m.dims().ny; ++y)
            for (std::uint32_t x = 0; x < m.dims().nx; ++x)
                if (m.at(x, y, z)) out.push_back({int(x), int(y), int(z)});
    return out;
}

// All-pairs nearest set-voxel distance field.
inline std::vector<double> brute_distance_field(const VoxelMask& m) {
    const auto features = set_voxels(m);
    const Spacing sp = m.spacing();
    std::vector<double> out(m.data().size(),
                            std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (std::uint32_t z = 0; z < m.dims().nz; ++z)
        for (std::uint32_t y = 0; y < m.dims().ny; ++y)
            for (std::uint32_t x = 0; x < m.dims().nx; ++x, ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& f : features) {
                    const double dx = (double(int(x)) - f[0]) * sp.sx;
                    const double dy = (double(int(y)) - f[1]) * sp.sy;
                    const double dz = (double(int(z)) - f[2]) * sp.sz;
                    best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
                }
                out[i] = best;
            }
    return out;
}

// Surface voxels: set voxels with a face-adjacent unset/out-of-bounds neighbor.
inline std::vector<std::array<int, 3>> brute_surface(const VoxelMask& m) {
    const int nx = int(m.dims().nx), ny = int(m.dims().ny), nz = int(m.dims().nz);
    const auto get = [&](int x, int y, int z) {
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return 0;
        return int(m.at(std::uint32_t(x), std::uint32_t(y), std::uint32_t(z)));
    };
    std::vector<std::array<int, 3>> out;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                if (!get(x, y, z)) continue;
                if (!get(x - 1, y, z) || !get(x + 1, y, z) || !get(x, y - 1, z) ||
                    !get(x, y + 1, z) || !get(x, y, z - 1) || !get(x, y, z + 1))
                    out.push_back({x, y, z});
            }
    return out;
}

// Directed surface distances of `from` against `to`, all pairs.
inline std::vector<double> brute_directed(const VoxelMask& from, const VoxelMask& to) {
    const auto sf = brute_surface(from);
    const auto st = brute_surface(to);
    const Spacing sp = from.spacing();
    std::vector<double> out;
    for (const auto& a : sf) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : st) {
            const double dx = (a[0] - b[0]) * sp.sx;
            const double dy = (a[1] - b[1]) * sp.sy;
            const double dz = (a[2] - b[2]) * sp.sz;
            best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        out.push_back(best);
    }
    return out;
}

inline double nearest_rank(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    auto r = std::size_t(std::ceil(q / 100.0 * double(xs.size())));
    r = std::clamp<std::size_t>(r, 1, xs.size());
    return xs[r - 1];
}

inline double brute_hausdorff(const VoxelMask& a, const VoxelMask& b, double q) {
    return std::max(nearest_rank(brute_directed(a, b), q),
                    nearest_rank(brute_directed(b, a), q));
}

inline double brute_asd(const VoxelMask& a, const VoxelMask& b) {
    const auto ab = brute_directed(a, b);
    const auto ba = brute_directed(b, a);
    double sum = 0.0;
    for (double d : ab) sum += d;
    for (double d : ba) sum += d;
    return sum / double(ab.size() + ba.size());
}

inline double brute_sdt(const VoxelMask& a, const VoxelMask& b, double t) {
    const auto ab = brute_directed(a, b);
    const auto ba = brute_directed(b, a);
    std::size_t hit = 0;
    for (double d : ab) hit += d <= t;
    for (double d : ba) hit += d <= t;
    return double(hit) / double(ab.size() + ba.size());
}

// Negative log-likelihood written from the cross-entropy formula itself,
// independent of mrseg::log_likelihood.
inline double cross_entropy(const std::vector<double>& p, const std::vector<int>& k) {
    double ce = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::clamp(p[i], 1e-12, 1.0 - 1e-12);
        ce -= k[i] * std::log(pi) + (1 - k[i]) * std::log(1.0 - pi);
    }
    return ce;
}

// Deterministic random mask for property tests.
inline VoxelMask random_mask(const mrseg::RngStream& rng, Dims d, Spacing sp,
                             double density = 0.35) {
    std::vector<std::uint8_t> data(d.count());
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = rng.uniform(i) < density ? 1 : 0;
    return VoxelMask(d, sp, std::move(data));
}

inline Spacing random_spacing(const mrseg::RngStream& rng, std::uint64_t c0 = 1000) {
    return {0.3 + 3.0 * rng.uniform(c0), 0.3 + 3.0 * rng.uniform(c0 + 1),
            0.3 + 3.0 * rng.uniform(c0 + 2)};
}

// Standard normal draw via Box-Muller on counter-based uniforms.
inline double normal_draw(const mrseg::RngStream& rng, std::uint64_t i) {
    const double u1 = std::max(rng.uniform(2 * i), 1e-300);
    const double u2 = rng.uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace oracle
