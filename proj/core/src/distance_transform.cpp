#include "mrseg/distance_transform.hpp"

#include <cmath>

namespace mrseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One lower-envelope pass along a line of n samples at physical pitch
// `step`. f holds squared distances accumulated over earlier axes, src the
// corresponding nearest-feature indices. Writes the 1D squared-distance
// minimum and the winning source per sample.
void envelope_pass(const std::vector<double>& f, const std::vector<std::size_t>& src,
                   int n, double step, std::vector<double>& out_d,
                   std::vector<std::size_t>& out_src,
                   std::vector<int>& v, std::vector<double>& z) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        const double xq = q * step;
        double s;
        while (true) {
            if (k < 0) break;
            const double xv = v[k] * step;
            s = (f[q] + xq * xq - (f[v[k]] + xv * xv)) / (2 * xq - 2 * xv);
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -kInf : s;
    }
    if (k < 0) {  // no features on this line
        for (int i = 0; i < n; ++i) {
            out_d[i] = kInf;
            out_src[i] = DistanceField::npos;
        }
        return;
    }
    int j = 0;
    for (int i = 0; i < n; ++i) {
        const double xi = i * step;
        while (j < k && z[j + 1] < xi) ++j;
        const double dx = xi - v[j] * step;
        out_d[i] = dx * dx + f[v[j]];
        out_src[i] = src[std::size_t(v[j])];
    }
}

}  // namespace

DistanceField distance_transform(const VoxelMask& mask) {
    const Dims d = mask.dims();
    const Spacing sp = mask.spacing();
    const std::size_t n = d.count();
    const int nx = int(d.nx), ny = int(d.ny), nz = int(d.nz);

    std::vector<double> d2(n);
    std::vector<std::size_t> src(n);
    for (std::size_t i = 0; i < n; ++i) {
        d2[i] = mask.data()[i] ? 0.0 : kInf;
        src[i] = mask.data()[i] ? i : DistanceField::npos;
    }

    const int nmax = std::max({nx, ny, nz});
    const auto line_len = std::size_t(nmax);
    std::vector<double> f(line_len), od(line_len);
    std::vector<std::size_t> fs(line_len), os(line_len);
    std::vector<int> v(line_len);
    std::vector<double> z(line_len + 1);

    auto sweep = [&](int len, double step, auto index_of) {
        for (int i = 0; i < len; ++i) {
            const std::size_t idx = index_of(i);
            f[std::size_t(i)] = d2[idx];
            fs[std::size_t(i)] = src[idx];
        }
        envelope_pass(f, fs, len, step, od, os, v, z);
        for (int i = 0; i < len; ++i) {
            const std::size_t idx = index_of(i);
            d2[idx] = od[std::size_t(i)];
            src[idx] = os[std::size_t(i)];
        }
    };

    // x, then y, then z; each pass folds one axis into the squared sum.
    for (int zz = 0; zz < nz; ++zz)
        for (int yy = 0; yy < ny; ++yy)
            sweep(nx, sp.sx, [&](int i) { return mask.index(std::uint32_t(i), std::uint32_t(yy), std::uint32_t(zz)); });
    for (int zz = 0; zz < nz; ++zz)
        for (int xx = 0; xx < nx; ++xx)
            sweep(ny, sp.sy, [&](int i) { return mask.index(std::uint32_t(xx), std::uint32_t(i), std::uint32_t(zz)); });
    for (int yy = 0; yy < ny; ++yy)
        for (int xx = 0; xx < nx; ++xx)
            sweep(nz, sp.sz, [&](int i) { return mask.index(std::uint32_t(xx), std::uint32_t(yy), std::uint32_t(i)); });

    // Recompute each distance from its winning feature coordinate so the
    // value is independent of pass-internal arithmetic.
    DistanceField out{d, sp, std::vector<double>(n), std::move(src)};
    for (std::size_t i = 0; i < n; ++i) {
        if (out.nearest[i] == DistanceField::npos) {
            out.dist_mm[i] = kInf;
            continue;
        }
        const std::size_t a = i, b = out.nearest[i];
        const auto coord = [&](std::size_t flat) {
            const std::uint32_t x = std::uint32_t(flat % d.nx);
            const std::uint32_t y = std::uint32_t((flat / d.nx) % d.ny);
            const std::uint32_t zc = std::uint32_t(flat / (std::size_t(d.nx) * d.ny));
            return std::array<std::uint32_t, 3>{x, y, zc};
        };
        const auto ca = coord(a), cb = coord(b);
        const double dx = (double(ca[0]) - double(cb[0])) * sp.sx;
        const double dy = (double(ca[1]) - double(cb[1])) * sp.sy;
        const double dz = (double(ca[2]) - double(cb[2])) * sp.sz;
        out.dist_mm[i] = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    return out;
}

SurfaceSet surface_voxels(const VoxelMask& mask) {
    const Dims d = mask.dims();
    SurfaceSet out;
    for (std::uint32_t z = 0; z < d.nz; ++z)
        for (std::uint32_t y = 0; y < d.ny; ++y)
            for (std::uint32_t x = 0; x < d.nx; ++x) {
                if (!mask.at(x, y, z)) continue;
                const bool border =
                    x == 0 || !mask.at(x - 1, y, z) || x + 1 == d.nx || !mask.at(x + 1, y, z) ||
                    y == 0 || !mask.at(x, y - 1, z) || y + 1 == d.ny || !mask.at(x, y + 1, z) ||
                    z == 0 || !mask.at(x, y, z - 1) || z + 1 == d.nz || !mask.at(x, y, z + 1);
                if (border) out.voxels.push_back({x, y, z});
            }
    return out;
}

VoxelMask surface_mask(const VoxelMask& mask) {
    std::vector<std::uint8_t> data(mask.data().size(), 0);
    for (const auto& v : surface_voxels(mask).voxels)
        data[mask.index(v[0], v[1], v[2])] = 1;
    return VoxelMask(mask.dims(), mask.spacing(), std::move(data));
}

}  // namespace mrseg
