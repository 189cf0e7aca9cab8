#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>
#include <vector>

#include "gliofuse/roi.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse::radiomics {

struct FixedBinCount {
    int bins = 32;
};

struct FixedBinWidth {
    double width = 25.0;
};

using BinningPolicy = std::variant<FixedBinCount, FixedBinWidth>;

/// Gray-level image restricted to an ROI: 0 outside the mask, 1..ng inside.
struct DiscretizedRoi {
    Dims dims{};
    Spacing spacing{};
    std::vector<int> labels;
    int ng = 1;
    std::vector<double> bin_edges;

    [[nodiscard]] std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept
    {
        return x + dims.nx * (y + dims.ny * z);
    }
    [[nodiscard]] int at(std::size_t x, std::size_t y, std::size_t z) const noexcept { return labels[index(x, y, z)]; }

    [[nodiscard]] std::size_t voxel_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l > 0; }));
    }

    /// Wraps an already-quantized label grid (0 = outside). `ng` defaults to the largest label.
    static DiscretizedRoi from_labels(Dims dims, std::vector<int> labels, int ng = 0, Spacing spacing = {})
    {
        DiscretizedRoi d;
        d.dims = dims;
        d.spacing = spacing;
        d.labels = std::move(labels);
        const int top = d.labels.empty() ? 1 : *std::max_element(d.labels.begin(), d.labels.end());
        d.ng = std::max({1, ng, top});
        return d;
    }
};

/// Quantizes masked intensities. Fixed bin count splits [min, max] into equal bins with the
/// top edge inclusive; fixed bin width uses floor((v - min) / w) + 1. A constant ROI gets ng = 1.
inline DiscretizedRoi discretize(const MaskedVolume& mv, const BinningPolicy& policy = FixedBinCount{})
{
    const Volume& img = *mv.image;
    const Mask& mask = *mv.mask;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (mask.bits[i]) {
            lo = std::min(lo, img[i]);
            hi = std::max(hi, img[i]);
        }
    }
    DiscretizedRoi d;
    d.dims = img.dims();
    d.spacing = img.spacing();
    d.labels.assign(mask.bits.size(), 0);
    if (!(hi > lo)) {
        d.ng = 1;
        d.bin_edges = {lo, hi};
        for (std::size_t i = 0; i < mask.bits.size(); ++i) {
            d.labels[i] = mask.bits[i] ? 1 : 0;
        }
        return d;
    }
    if (const auto* count = std::get_if<FixedBinCount>(&policy)) {
        const int n = std::max(1, count->bins);
        d.ng = n;
        const double range = hi - lo;
        for (int k = 0; k <= n; ++k) {
            d.bin_edges.push_back(lo + range * k / n);
        }
        for (std::size_t i = 0; i < mask.bits.size(); ++i) {
            if (mask.bits[i]) {
                const auto bin = static_cast<int>(std::floor((img[i] - lo) / range * n));
                d.labels[i] = std::clamp(bin, 0, n - 1) + 1;
            }
        }
    } else {
        const double w = std::get<FixedBinWidth>(policy).width;
        int top = 1;
        for (std::size_t i = 0; i < mask.bits.size(); ++i) {
            if (mask.bits[i]) {
                d.labels[i] = static_cast<int>(std::floor((img[i] - lo) / w)) + 1;
                top = std::max(top, d.labels[i]);
            }
        }
        d.ng = top;
        for (int k = 0; k <= top; ++k) {
            d.bin_edges.push_back(lo + w * k);
        }
    }
    return d;
}

/// The 13 unique 3-D neighbour offsets at Chebyshev distance 1 (one of each +/- pair).
inline constexpr std::array<std::array<int, 3>, 13> kDirections{{
    {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, -1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 0, -1},
    {0, 1, 1}, {0, 1, -1}, {1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1},
}};

namespace detail {

/// Label at (x+dx, y+dy, z+dz), or 0 when outside the grid or mask.
inline int neighbor(const DiscretizedRoi& d, std::size_t x, std::size_t y, std::size_t z, int dx, int dy, int dz) noexcept
{
    const auto px = static_cast<std::ptrdiff_t>(x) + dx;
    const auto py = static_cast<std::ptrdiff_t>(y) + dy;
    const auto pz = static_cast<std::ptrdiff_t>(z) + dz;
    if (px < 0 || py < 0 || pz < 0 || px >= static_cast<std::ptrdiff_t>(d.dims.nx) ||
        py >= static_cast<std::ptrdiff_t>(d.dims.ny) || pz >= static_cast<std::ptrdiff_t>(d.dims.nz)) {
        return 0;
    }
    return d.at(static_cast<std::size_t>(px), static_cast<std::size_t>(py), static_cast<std::size_t>(pz));
}

template <typename F>
void for_each_voxel(const DiscretizedRoi& d, F&& f)
{
    for (std::size_t z = 0; z < d.dims.nz; ++z) {
        for (std::size_t y = 0; y < d.dims.ny; ++y) {
            for (std::size_t x = 0; x < d.dims.nx; ++x) {
                const int l = d.labels[x + d.dims.nx * (y + d.dims.ny * z)];
                if (l > 0) {
                    f(x, y, z, l);
                }
            }
        }
    }
}

inline double plogp(double p) noexcept { return p > 0.0 ? p * std::log2(p) : 0.0; }

} // namespace detail

} // namespace gliofuse::radiomics
