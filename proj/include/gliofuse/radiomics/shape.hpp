#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>
#include <vector>

#include "gliofuse/linalg.hpp"
#include "gliofuse/radiomics/texture_matrix.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse::radiomics {

// The three planar diameters are reported largest first so the set does not depend on
// which grid axis the object happens to be aligned with.
inline constexpr std::array<std::string_view, 14> kShapeNames{
    "MeshVolume", "VoxelVolume", "SurfaceArea", "SurfaceVolumeRatio", "Sphericity",
    "Maximum3DDiameter", "Maximum2DDiameterPlane1", "Maximum2DDiameterPlane2", "Maximum2DDiameterPlane3",
    "MajorAxisLength", "MinorAxisLength", "LeastAxisLength", "Elongation", "Flatness",
};

namespace detail {

struct Voxel {
    std::int64_t x, y, z;
};

// Voxels that are extreme along every axis-parallel line through them. Only these can be
// vertices of the convex hull, so farthest pairs are found among them.
inline std::vector<Voxel> hull_candidates(const Mask& m, std::array<bool, 3> axes)
{
    const Dims d = m.dims;
    constexpr auto none = std::numeric_limits<std::int64_t>::max();
    std::vector<std::array<std::int64_t, 2>> xl(d.ny * d.nz, {none, -1});
    std::vector<std::array<std::int64_t, 2>> yl(d.nx * d.nz, {none, -1});
    std::vector<std::array<std::int64_t, 2>> zl(d.nx * d.ny, {none, -1});
    for (std::size_t z = 0; z < d.nz; ++z) {
        for (std::size_t y = 0; y < d.ny; ++y) {
            for (std::size_t x = 0; x < d.nx; ++x) {
                if (!m.at(x, y, z)) {
                    continue;
                }
                auto upd = [](std::array<std::int64_t, 2>& r, std::size_t v) {
                    r[0] = std::min(r[0], static_cast<std::int64_t>(v));
                    r[1] = std::max(r[1], static_cast<std::int64_t>(v));
                };
                upd(xl[y + d.ny * z], x);
                upd(yl[x + d.nx * z], y);
                upd(zl[x + d.nx * y], z);
            }
        }
    }
    std::vector<Voxel> out;
    for (std::size_t z = 0; z < d.nz; ++z) {
        for (std::size_t y = 0; y < d.ny; ++y) {
            for (std::size_t x = 0; x < d.nx; ++x) {
                if (!m.at(x, y, z)) {
                    continue;
                }
                const auto ext = [](const std::array<std::int64_t, 2>& r, std::size_t v) {
                    return static_cast<std::int64_t>(v) == r[0] || static_cast<std::int64_t>(v) == r[1];
                };
                if ((!axes[0] || ext(xl[y + d.ny * z], x)) && (!axes[1] || ext(yl[x + d.nx * z], y)) &&
                    (!axes[2] || ext(zl[x + d.nx * y], z))) {
                    out.push_back({static_cast<std::int64_t>(x), static_cast<std::int64_t>(y), static_cast<std::int64_t>(z)});
                }
            }
        }
    }
    return out;
}

inline double dist2(const Voxel& a, const Voxel& b, const Spacing& s) noexcept
{
    const double dx = static_cast<double>(a.x - b.x) * s.sx;
    const double dy = static_cast<double>(a.y - b.y) * s.sy;
    const double dz = static_cast<double>(a.z - b.z) * s.sz;
    return dx * dx + dy * dy + dz * dz;
}

// Largest in-plane distance over planes perpendicular to `axis` (0 = x, 1 = y, 2 = z).
inline double max_planar_diameter(const Mask& m, const Spacing& s, int axis)
{
    std::array<bool, 3> axes{true, true, true};
    axes[static_cast<std::size_t>(axis)] = false;
    auto cand = hull_candidates(m, axes);
    auto key = [axis](const Voxel& v) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; };
    std::stable_sort(cand.begin(), cand.end(), [&](const Voxel& a, const Voxel& b) { return key(a) < key(b); });
    double best = 0.0;
    for (std::size_t i = 0; i < cand.size();) {
        std::size_t j = i;
        while (j < cand.size() && key(cand[j]) == key(cand[i])) {
            ++j;
        }
        for (std::size_t a = i; a < j; ++a) {
            for (std::size_t b = a + 1; b < j; ++b) {
                best = std::max(best, dist2(cand[a], cand[b], s));
            }
        }
        i = j;
    }
    return std::sqrt(best);
}

} // namespace detail

/// Shape descriptors of a binary mask. Volume is voxel count times voxel volume; surface
/// area counts exposed voxel faces; axis lengths are 4*sqrt(eigenvalue) of the population
/// covariance of voxel-centre coordinates.
inline FeatureValues<14> shape_features(const Mask& m, const Spacing& s)
{
    const Dims d = m.dims;
    std::int64_t n = 0;
    std::array<std::int64_t, 3> faces{};
    std::array<std::int64_t, 3> sum{};
    std::array<std::array<std::int64_t, 3>, 3> sum2{};
    auto inside = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        return x >= 0 && y >= 0 && z >= 0 && x < static_cast<std::int64_t>(d.nx) && y < static_cast<std::int64_t>(d.ny) &&
               z < static_cast<std::int64_t>(d.nz) &&
               m.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z));
    };
    for (std::size_t z = 0; z < d.nz; ++z) {
        for (std::size_t y = 0; y < d.ny; ++y) {
            for (std::size_t x = 0; x < d.nx; ++x) {
                if (!m.at(x, y, z)) {
                    continue;
                }
                ++n;
                const std::array<std::int64_t, 3> p{static_cast<std::int64_t>(x), static_cast<std::int64_t>(y),
                                                     static_cast<std::int64_t>(z)};
                for (std::size_t a = 0; a < 3; ++a) {
                    sum[a] += p[a];
                    for (std::size_t b = 0; b < 3; ++b) {
                        sum2[a][b] += p[a] * p[b];
                    }
                }
                faces[0] += !inside(p[0] - 1, p[1], p[2]) + !inside(p[0] + 1, p[1], p[2]);
                faces[1] += !inside(p[0], p[1] - 1, p[2]) + !inside(p[0], p[1] + 1, p[2]);
                faces[2] += !inside(p[0], p[1], p[2] - 1) + !inside(p[0], p[1], p[2] + 1);
            }
        }
    }
    if (n == 0) {
        throw Error(ErrorCode::EmptyMask, "shape features of an empty mask");
    }
    const double volume = static_cast<double>(n) * s.voxel_volume();
    const double area = static_cast<double>(faces[0]) * s.sy * s.sz + static_cast<double>(faces[1]) * s.sx * s.sz +
                        static_cast<double>(faces[2]) * s.sx * s.sy;
    const double sphericity = std::cbrt(std::numbers::pi) * std::pow(6.0 * volume, 2.0 / 3.0) / area;

    // Covariance from exact integer moments: (n * sum_ab - sum_a * sum_b) / n^2.
    const std::array<double, 3> sp{s.sx, s.sy, s.sz};
    Matrix cov(3, 3);
    const auto nd = static_cast<double>(n);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            const std::int64_t num = n * sum2[a][b] - sum[a] * sum[b];
            cov(a, b) = static_cast<double>(num) / (nd * nd) * sp[a] * sp[b];
        }
    }
    auto eig = jacobi_eigen(cov);
    const double top = std::max(eig.values[0], 0.0);
    std::array<double, 3> lam{};
    for (std::size_t k = 0; k < 3; ++k) {
        lam[k] = eig.values[k] > 1e-12 * top ? eig.values[k] : 0.0;
    }

    const auto cand = detail::hull_candidates(m, {true, true, true});
    double far2 = 0.0;
    for (std::size_t a = 0; a < cand.size(); ++a) {
        for (std::size_t b = a + 1; b < cand.size(); ++b) {
            far2 = std::max(far2, detail::dist2(cand[a], cand[b], s));
        }
    }
    std::array<double, 3> planar{detail::max_planar_diameter(m, s, 2), detail::max_planar_diameter(m, s, 1),
                                 detail::max_planar_diameter(m, s, 0)};
    std::sort(planar.begin(), planar.end(), std::greater<>());

    return {
        volume,
        volume,
        area,
        area / volume,
        sphericity,
        std::sqrt(far2),
        planar[0],
        planar[1],
        planar[2],
        4.0 * std::sqrt(lam[0]),
        4.0 * std::sqrt(lam[1]),
        4.0 * std::sqrt(lam[2]),
        lam[0] > 0.0 ? std::sqrt(lam[1] / lam[0]) : 1.0,
        lam[0] > 0.0 ? std::sqrt(lam[2] / lam[0]) : 1.0,
    };
}

} // namespace gliofuse::radiomics
