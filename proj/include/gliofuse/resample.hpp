#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gliofuse/error.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse {

struct SliceSize {
    std::size_t nx = 128;
    std::size_t ny = 128;
};

/// Resamples every axial slice to `target`. Intensities use bilinear interpolation with
/// half-pixel centres and edge clamping; label volumes use nearest neighbour. The slice
/// count is unchanged and in-plane spacing scales with the size ratio.
inline Volume resize_volume(const Volume& v, SliceSize target = {})
{
    if (v.empty()) {
        throw Error(ErrorCode::EmptyVolume, "cannot resize an empty volume");
    }
    if (target.nx < 1 || target.ny < 1) {
        throw Error(ErrorCode::EmptyVolume, "resize target must be at least 1x1");
    }
    const Dims src = v.dims();
    const Dims dst{target.nx, target.ny, src.nz};
    const double scale_x = static_cast<double>(src.nx) / static_cast<double>(dst.nx);
    const double scale_y = static_cast<double>(src.ny) / static_cast<double>(dst.ny);

    std::vector<double> out(dst.count());
    for (std::size_t z = 0; z < dst.nz; ++z) {
        for (std::size_t y = 0; y < dst.ny; ++y) {
            const double fy = (static_cast<double>(y) + 0.5) * scale_y - 0.5;
            for (std::size_t x = 0; x < dst.nx; ++x) {
                const double fx = (static_cast<double>(x) + 0.5) * scale_x - 0.5;
                double value = 0.0;
                if (v.is_label()) {
                    const auto ix = std::min(src.nx - 1, static_cast<std::size_t>(std::max(0.0, std::floor(fx + 0.5))));
                    const auto iy = std::min(src.ny - 1, static_cast<std::size_t>(std::max(0.0, std::floor(fy + 0.5))));
                    value = v.at(ix, iy, z);
                } else {
                    const double cx = std::clamp(fx, 0.0, static_cast<double>(src.nx - 1));
                    const double cy = std::clamp(fy, 0.0, static_cast<double>(src.ny - 1));
                    const auto x0 = static_cast<std::size_t>(std::floor(cx));
                    const auto y0 = static_cast<std::size_t>(std::floor(cy));
                    const std::size_t x1 = std::min(x0 + 1, src.nx - 1);
                    const std::size_t y1 = std::min(y0 + 1, src.ny - 1);
                    const double wx = cx - static_cast<double>(x0);
                    const double wy = cy - static_cast<double>(y0);
                    value = (1 - wy) * ((1 - wx) * v.at(x0, y0, z) + wx * v.at(x1, y0, z)) +
                            wy * ((1 - wx) * v.at(x0, y1, z) + wx * v.at(x1, y1, z));
                }
                out[x + dst.nx * (y + dst.ny * z)] = value;
            }
        }
    }
    const Spacing sp{v.spacing().sx * scale_x, v.spacing().sy * scale_y, v.spacing().sz};
    return Volume(dst, sp, std::move(out), v.is_label());
}

/// Min-max normalization to [0, 1] over nonzero (brain) voxels. Background stays 0 and a
/// constant foreground maps to 1.
inline Volume normalize_volume(const Volume& v)
{
    if (v.empty()) {
        throw Error(ErrorCode::EmptyVolume, "cannot normalize an empty volume");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : v.data()) {
        if (x != 0.0) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    std::vector<double> out(v.data().begin(), v.data().end());
    if (lo > hi) {
        return Volume(v.dims(), v.spacing(), std::move(out), v.is_label());
    }
    const double range = hi - lo;
    for (double& x : out) {
        if (x == 0.0) {
            continue;
        }
        x = range > 0.0 ? std::clamp((x - lo) / range, 0.0, 1.0) : 1.0;
    }
    return Volume(v.dims(), v.spacing(), std::move(out), v.is_label());
}

} // namespace gliofuse
