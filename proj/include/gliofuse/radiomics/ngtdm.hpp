#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gliofuse/radiomics/discretize.hpp"
#include "gliofuse/radiomics/texture_matrix.hpp"

namespace gliofuse::radiomics {

inline constexpr std::array<std::string_view, 5> kNgtdmNames{"Coarseness", "Contrast", "Busyness", "Complexity", "Strength"};

inline constexpr double kCoarsenessCap = 1e6;

/// Neighbouring gray-tone difference matrix: columns (n_i, p_i, s_i) per level. Only voxels
/// with at least one in-mask 26-neighbour contribute; s_i sums |i - mean neighbour level|.
inline TextureMatrix ngtdm_matrix(const DiscretizedRoi& d)
{
    TextureMatrix m(MatrixKind::NGTDM, d.ng, {0.0, 1.0, 2.0});
    m.meta = "columns n,p,s";
    const auto ng = static_cast<std::size_t>(d.ng);
    // |i*c - S| accumulated exactly per (level, neighbour count c) keeps s_i independent of
    // voxel visiting order.
    std::vector<std::int64_t> num(ng * 27, 0);
    std::vector<std::int64_t> count(ng, 0);
    detail::for_each_voxel(d, [&](std::size_t x, std::size_t y, std::size_t z, int level) {
        std::int64_t c = 0;
        std::int64_t s = 0;
        for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0 && dz == 0) {
                        continue;
                    }
                    const int nb = detail::neighbor(d, x, y, z, dx, dy, dz);
                    if (nb > 0) {
                        ++c;
                        s += nb;
                    }
                }
            }
        }
        if (c == 0) {
            return;
        }
        const auto i = static_cast<std::size_t>(level - 1);
        num[i * 27 + static_cast<std::size_t>(c)] += std::llabs(level * c - s);
        ++count[i];
    });
    std::int64_t nv = 0;
    for (auto c : count) {
        nv += c;
    }
    for (std::size_t i = 0; i < ng; ++i) {
        const int level = static_cast<int>(i) + 1;
        double s = 0.0;
        for (std::size_t c = 1; c <= 26; ++c) {
            s += static_cast<double>(num[i * 27 + c]) / static_cast<double>(c);
        }
        m.at(level, 0) = static_cast<double>(count[i]);
        m.at(level, 1) = nv > 0 ? static_cast<double>(count[i]) / static_cast<double>(nv) : 0.0;
        m.at(level, 2) = s;
    }
    return m;
}

inline FeatureValues<5> ngtdm_features_from_matrix(const TextureMatrix& m)
{
    struct Level {
        double i, p, s;
    };
    std::vector<Level> live;
    double nv = 0.0;
    double s_total = 0.0;
    double ps = 0.0;
    for (int i = 1; i <= m.rows; ++i) {
        nv += m.at(i, 0);
        if (m.at(i, 1) > 0.0) {
            live.push_back({static_cast<double>(i), m.at(i, 1), m.at(i, 2)});
            s_total += m.at(i, 2);
            ps += m.at(i, 1) * m.at(i, 2);
        }
    }
    FeatureValues<5> f{};
    f[0] = ps > 0.0 ? 1.0 / ps : kCoarsenessCap;
    if (live.empty()) {
        return f;
    }
    const auto ngp = static_cast<double>(live.size());
    double pair_contrast = 0.0;
    double busy_den = 0.0;
    double complexity = 0.0;
    double strength = 0.0;
    for (const auto& a : live) {
        for (const auto& b : live) {
            const double diff = a.i - b.i;
            pair_contrast += a.p * b.p * diff * diff;
            busy_den += std::fabs(a.i * a.p - b.i * b.p);
            complexity += std::fabs(diff) * (a.p * a.s + b.p * b.s) / (a.p + b.p);
            strength += (a.p + b.p) * diff * diff;
        }
    }
    f[1] = ngp > 1.0 ? pair_contrast / (ngp * (ngp - 1.0)) * (s_total / nv) : 0.0;
    f[2] = busy_den > 0.0 ? ps / busy_den : 0.0;
    f[3] = complexity / nv;
    f[4] = s_total > 0.0 ? strength / s_total : 0.0;
    return f;
}

inline FeatureValues<5> ngtdm_features(const DiscretizedRoi& d)
{
    return ngtdm_features_from_matrix(ngtdm_matrix(d));
}

} // namespace gliofuse::radiomics
