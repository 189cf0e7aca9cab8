#pragma once

// Run-length, size-zone and dependence matrices share one feature algebra: rows are gray
// levels i, columns carry a size-like value j (run length, zone size, dependence count).

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <string_view>
#include <vector>

#include "gliofuse/radiomics/discretize.hpp"
#include "gliofuse/radiomics/glcm.hpp"
#include "gliofuse/radiomics/texture_matrix.hpp"

namespace gliofuse::radiomics {

inline constexpr std::array<std::string_view, 16> kGlrlmNames{
    "ShortRunEmphasis", "LongRunEmphasis", "GrayLevelNonUniformity", "GrayLevelNonUniformityNormalized",
    "RunLengthNonUniformity", "RunLengthNonUniformityNormalized", "RunPercentage", "GrayLevelVariance",
    "RunVariance", "RunEntropy", "LowGrayLevelRunEmphasis", "HighGrayLevelRunEmphasis",
    "ShortRunLowGrayLevelEmphasis", "ShortRunHighGrayLevelEmphasis", "LongRunLowGrayLevelEmphasis",
    "LongRunHighGrayLevelEmphasis",
};

inline constexpr std::array<std::string_view, 16> kGlszmNames{
    "SmallAreaEmphasis", "LargeAreaEmphasis", "GrayLevelNonUniformity", "GrayLevelNonUniformityNormalized",
    "SizeZoneNonUniformity", "SizeZoneNonUniformityNormalized", "ZonePercentage", "GrayLevelVariance",
    "ZoneVariance", "ZoneEntropy", "LowGrayLevelZoneEmphasis", "HighGrayLevelZoneEmphasis",
    "SmallAreaLowGrayLevelEmphasis", "SmallAreaHighGrayLevelEmphasis", "LargeAreaLowGrayLevelEmphasis",
    "LargeAreaHighGrayLevelEmphasis",
};

inline constexpr std::array<std::string_view, 14> kGldmNames{
    "SmallDependenceEmphasis", "LargeDependenceEmphasis", "GrayLevelNonUniformity", "DependenceNonUniformity",
    "DependenceNonUniformityNormalized", "GrayLevelVariance", "DependenceVariance", "DependenceEntropy",
    "LowGrayLevelEmphasis", "HighGrayLevelEmphasis", "SmallDependenceLowGrayLevelEmphasis",
    "SmallDependenceHighGrayLevelEmphasis", "LargeDependenceLowGrayLevelEmphasis",
    "LargeDependenceHighGrayLevelEmphasis",
};

/// The shared 16-feature set in GLRLM/GLSZM order. `voxels` is the ROI voxel count used by
/// the percentage feature; `j_shift` is added to each column value before use.
inline FeatureValues<16> size_family_features(const TextureMatrix& m, double voxels, double j_shift = 0.0)
{
    const double total = m.sum();
    FeatureValues<16> f{};
    if (total <= 0.0) {
        return f;
    }
    std::vector<double> row_sum(static_cast<std::size_t>(m.rows), 0.0);
    std::vector<double> col_sum(m.cols(), 0.0);
    double mu_i = 0.0;
    double mu_j = 0.0;
    for (int i = 1; i <= m.rows; ++i) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m.at(i, c);
            row_sum[static_cast<std::size_t>(i - 1)] += v;
            col_sum[c] += v;
            mu_i += i * v / total;
            mu_j += (m.column_values[c] + j_shift) * v / total;
        }
    }
    for (int i = 1; i <= m.rows; ++i) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m.at(i, c);
            if (v == 0.0) {
                continue;
            }
            const double p = v / total;
            const double a = i;
            const double a2 = a * a;
            const double j = m.column_values[c] + j_shift;
            const double j2 = j * j;
            f[0] += p / j2;
            f[1] += p * j2;
            f[7] += p * (a - mu_i) * (a - mu_i);
            f[8] += p * (j - mu_j) * (j - mu_j);
            f[9] -= p * std::log2(p);
            f[10] += p / a2;
            f[11] += p * a2;
            f[12] += p / (a2 * j2);
            f[13] += p * a2 / j2;
            f[14] += p * j2 / a2;
            f[15] += p * a2 * j2;
        }
    }
    for (double r : row_sum) {
        f[2] += r * r;
    }
    f[2] /= total;
    f[3] = f[2] / total;
    for (double c : col_sum) {
        f[4] += c * c;
    }
    f[4] /= total;
    f[5] = f[4] / total;
    f[6] = total / voxels;
    return f;
}

/// Run lengths along one direction: cell (level, length) counts maximal same-level runs.
inline TextureMatrix glrlm_matrix(const DiscretizedRoi& d, std::array<int, 3> dir)
{
    const std::size_t longest = std::max({d.dims.nx, d.dims.ny, d.dims.nz});
    std::vector<double> cols(longest);
    for (std::size_t j = 0; j < longest; ++j) {
        cols[j] = static_cast<double>(j + 1);
    }
    TextureMatrix m(MatrixKind::GLRLM, d.ng, std::move(cols));
    m.meta = "direction " + std::to_string(dir[0]) + "," + std::to_string(dir[1]) + "," + std::to_string(dir[2]);
    detail::for_each_voxel(d, [&](std::size_t x, std::size_t y, std::size_t z, int level) {
        if (detail::neighbor(d, x, y, z, -dir[0], -dir[1], -dir[2]) == level) {
            return; // not the start of a run
        }
        std::size_t len = 1;
        while (detail::neighbor(d, x, y, z, static_cast<int>(len) * dir[0], static_cast<int>(len) * dir[1],
                                static_cast<int>(len) * dir[2]) == level) {
            ++len;
        }
        m.at(level, len - 1) += 1.0;
    });
    return m;
}

inline FeatureValues<16> glrlm_features(const DiscretizedRoi& d)
{
    const auto voxels = static_cast<double>(d.voxel_count());
    std::vector<FeatureValues<16>> per;
    for (const auto& dir : kDirections) {
        per.push_back(size_family_features(glrlm_matrix(d, dir), voxels));
    }
    return average_sorted(per);
}

/// Zones are 26-connected components of equal gray level; cell (level, size) counts them.
/// Columns list only the zone sizes that occur, ascending.
inline TextureMatrix glszm_matrix(const DiscretizedRoi& d)
{
    std::vector<std::uint8_t> seen(d.labels.size(), 0);
    std::map<std::pair<int, std::size_t>, double> zones;
    std::vector<std::size_t> stack;
    const auto nx = static_cast<std::ptrdiff_t>(d.dims.nx);
    const auto ny = static_cast<std::ptrdiff_t>(d.dims.ny);
    const auto nz = static_cast<std::ptrdiff_t>(d.dims.nz);
    for (std::size_t start = 0; start < d.labels.size(); ++start) {
        const int level = d.labels[start];
        if (level == 0 || seen[start]) {
            continue;
        }
        std::size_t size = 0;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            ++size;
            const auto cx = static_cast<std::ptrdiff_t>(cur % d.dims.nx);
            const auto cy = static_cast<std::ptrdiff_t>((cur / d.dims.nx) % d.dims.ny);
            const auto cz = static_cast<std::ptrdiff_t>(cur / (d.dims.nx * d.dims.ny));
            for (std::ptrdiff_t dz = -1; dz <= 1; ++dz) {
                for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
                    for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                        const auto x = cx + dx;
                        const auto y = cy + dy;
                        const auto z = cz + dz;
                        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) {
                            continue;
                        }
                        const auto idx = static_cast<std::size_t>(x + nx * (y + ny * z));
                        if (!seen[idx] && d.labels[idx] == level) {
                            seen[idx] = 1;
                            stack.push_back(idx);
                        }
                    }
                }
            }
        }
        zones[{level, size}] += 1.0;
    }
    std::vector<double> sizes;
    for (const auto& [key, count] : zones) {
        sizes.push_back(static_cast<double>(key.second));
    }
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    TextureMatrix m(MatrixKind::GLSZM, d.ng, sizes);
    for (const auto& [key, count] : zones) {
        const auto col = static_cast<std::size_t>(
            std::lower_bound(sizes.begin(), sizes.end(), static_cast<double>(key.second)) - sizes.begin());
        m.at(key.first, col) = count;
    }
    return m;
}

inline FeatureValues<16> glszm_features(const DiscretizedRoi& d)
{
    return size_family_features(glszm_matrix(d), static_cast<double>(d.voxel_count()));
}

/// Dependence counts: cell (level, k) counts voxels with exactly k of their 26 in-mask
/// neighbours within `alpha` gray levels. Columns are k = 0..26.
inline TextureMatrix gldm_matrix(const DiscretizedRoi& d, int alpha = 0)
{
    std::vector<double> cols(27);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        cols[k] = static_cast<double>(k);
    }
    TextureMatrix m(MatrixKind::GLDM, d.ng, std::move(cols));
    m.meta = "alpha " + std::to_string(alpha);
    detail::for_each_voxel(d, [&](std::size_t x, std::size_t y, std::size_t z, int level) {
        std::size_t dep = 0;
        for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0 && dz == 0) {
                        continue;
                    }
                    const int nb = detail::neighbor(d, x, y, z, dx, dy, dz);
                    if (nb > 0 && std::abs(nb - level) <= alpha) {
                        ++dep;
                    }
                }
            }
        }
        m.at(level, dep) += 1.0;
    });
    return m;
}

/// Dependence features; the dependence value used in the formulas counts the centre voxel
/// too (neighbours + 1), so it is never zero.
inline FeatureValues<14> gldm_features(const DiscretizedRoi& d, int alpha = 0)
{
    const auto all = size_family_features(gldm_matrix(d, alpha), static_cast<double>(d.voxel_count()), 1.0);
    return {all[0], all[1], all[2], all[4], all[5], all[7], all[8], all[9], all[10], all[11], all[12], all[13], all[14], all[15]};
}

} // namespace gliofuse::radiomics
