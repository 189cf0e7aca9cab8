#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include "gliofuse/linalg.hpp"
#include "gliofuse/radiomics/discretize.hpp"
#include "gliofuse/radiomics/texture_matrix.hpp"

namespace gliofuse::radiomics {

inline constexpr std::array<std::string_view, 24> kGlcmNames{
    "Autocorrelation", "JointAverage", "ClusterProminence", "ClusterShade", "ClusterTendency", "Contrast",
    "Correlation", "DifferenceAverage", "DifferenceEntropy", "DifferenceVariance", "JointEnergy", "JointEntropy",
    "Imc1", "Imc2", "Idm", "MCC", "Idmn", "Id", "Idn", "InverseVariance", "MaximumProbability", "SumAverage",
    "SumEntropy", "SumSquares",
};

/// Symmetric co-occurrence counts (ng x ng) for one offset; both orderings of each in-mask
/// pair are counted.
inline TextureMatrix glcm_matrix(const DiscretizedRoi& d, std::array<int, 3> offset)
{
    std::vector<double> cols(static_cast<std::size_t>(d.ng));
    for (int j = 0; j < d.ng; ++j) {
        cols[static_cast<std::size_t>(j)] = j + 1;
    }
    TextureMatrix m(MatrixKind::GLCM, d.ng, std::move(cols));
    m.meta = "offset " + std::to_string(offset[0]) + "," + std::to_string(offset[1]) + "," + std::to_string(offset[2]);
    detail::for_each_voxel(d, [&](std::size_t x, std::size_t y, std::size_t z, int a) {
        const int b = detail::neighbor(d, x, y, z, offset[0], offset[1], offset[2]);
        if (b > 0) {
            m.at(a, static_cast<std::size_t>(b - 1)) += 1.0;
            m.at(b, static_cast<std::size_t>(a - 1)) += 1.0;
        }
    });
    return m;
}

namespace detail {

inline FeatureValues<24> glcm_degenerate()
{
    FeatureValues<24> f{};
    f[6] = 1.0;  // Correlation
    f[15] = 1.0; // MCC
    return f;
}

// Second-largest eigenvalue magnitude of D^-1/2 P D^-1/2 over occupied levels; its square is
// the second eigenvalue of Q(i,j) = sum_k p(i,k) p(j,k) / (px(i) px(k)).
inline double maximal_correlation(const std::vector<double>& p, const std::vector<double>& px, int ng)
{
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < static_cast<std::size_t>(ng); ++i) {
        if (px[i] > 0.0) {
            live.push_back(i);
        }
    }
    if (live.size() < 2) {
        return 1.0;
    }
    Matrix m(live.size(), live.size());
    for (std::size_t a = 0; a < live.size(); ++a) {
        for (std::size_t b = 0; b < live.size(); ++b) {
            const std::size_t i = live[a];
            const std::size_t j = live[b];
            m(a, b) = p[i * static_cast<std::size_t>(ng) + j] / std::sqrt(px[i] * px[j]);
        }
    }
    auto eig = jacobi_eigen(m);
    std::vector<double> mags;
    for (double v : eig.values) {
        mags.push_back(std::fabs(v));
    }
    std::sort(mags.begin(), mags.end(), std::greater<>());
    return std::min(1.0, mags[1]);
}

} // namespace detail

/// The 24 co-occurrence features of one count matrix (normalized internally).
inline FeatureValues<24> glcm_features_from_matrix(const TextureMatrix& counts)
{
    const int ng = counts.rows;
    const auto n = static_cast<std::size_t>(ng);
    const double total = counts.sum();
    if (total <= 0.0) {
        return detail::glcm_degenerate();
    }
    std::vector<double> p(counts.cells.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = counts.cells[k] / total;
    }
    auto P = [&](std::size_t i, std::size_t j) { return p[i * n + j]; };

    std::vector<double> px(n, 0.0);
    std::vector<double> py(n, 0.0);
    std::vector<double> psum(2 * n + 1, 0.0); // index k = i + j with levels 1-based
    std::vector<double> pdiff(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            px[i] += P(i, j);
            py[j] += P(i, j);
            psum[i + j + 2] += P(i, j);
            pdiff[i > j ? i - j : j - i] += P(i, j);
        }
    }
    double ux = 0.0;
    double uy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ux += static_cast<double>(i + 1) * px[i];
        uy += static_cast<double>(i + 1) * py[i];
    }
    double vx = 0.0;
    double vy = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        vx += (static_cast<double>(i + 1) - ux) * (static_cast<double>(i + 1) - ux) * px[i];
        vy += (static_cast<double>(i + 1) - uy) * (static_cast<double>(i + 1) - uy) * py[i];
        hx -= detail::plogp(px[i]);
        hy -= detail::plogp(py[i]);
    }

    double autocorr = 0.0, prominence = 0.0, shade = 0.0, tendency = 0.0, contrast = 0.0;
    double energy = 0.0, hxy = 0.0, hxy1 = 0.0, hxy2 = 0.0, idm = 0.0, idmn = 0.0, id = 0.0, idn = 0.0;
    double maxp = 0.0, sum_squares = 0.0;
    const double ngd = static_cast<double>(ng);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double pij = P(i, j);
            const double a = static_cast<double>(i + 1);
            const double b = static_cast<double>(j + 1);
            const double pxy = px[i] * py[j];
            if (pxy > 0.0) {
                hxy1 -= pij * std::log2(pxy);
                hxy2 -= pxy * std::log2(pxy);
            }
            if (pij == 0.0) {
                continue;
            }
            const double c = a + b - ux - uy;
            const double diff = std::fabs(a - b);
            autocorr += pij * a * b;
            prominence += c * c * c * c * pij;
            shade += c * c * c * pij;
            tendency += c * c * pij;
            contrast += diff * diff * pij;
            energy += pij * pij;
            hxy -= pij * std::log2(pij);
            idm += pij / (1.0 + diff * diff);
            idmn += pij / (1.0 + diff * diff / (ngd * ngd));
            id += pij / (1.0 + diff);
            idn += pij / (1.0 + diff / ngd);
            maxp = std::max(maxp, pij);
            sum_squares += (a - ux) * (a - ux) * pij;
        }
    }

    double diff_avg = 0.0, diff_ent = 0.0, inv_var = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        diff_avg += static_cast<double>(k) * pdiff[k];
        diff_ent -= detail::plogp(pdiff[k]);
        if (k > 0) {
            inv_var += pdiff[k] / static_cast<double>(k * k);
        }
    }
    double diff_var = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        diff_var += (static_cast<double>(k) - diff_avg) * (static_cast<double>(k) - diff_avg) * pdiff[k];
    }
    double sum_avg = 0.0, sum_ent = 0.0;
    for (std::size_t k = 2; k <= 2 * n; ++k) {
        sum_avg += static_cast<double>(k) * psum[k];
        sum_ent -= detail::plogp(psum[k]);
    }

    const double sx = std::sqrt(vx);
    const double sy = std::sqrt(vy);
    const bool flat = !(sx > 0.0 && sy > 0.0);
    const double correlation = flat ? 1.0 : (autocorr - ux * uy) / (sx * sy);
    const double hmax = std::max(hx, hy);
    const double imc1 = hmax > 0.0 ? (hxy - hxy1) / hmax : 0.0;
    const double imc2 = hxy2 > hxy ? std::sqrt(1.0 - std::exp(-2.0 * (hxy2 - hxy))) : 0.0;
    const double mcc = flat ? 1.0 : detail::maximal_correlation(p, px, ng);

    return {autocorr, ux, prominence, shade, tendency, contrast, correlation, diff_avg, diff_ent, diff_var,
            energy, hxy, imc1, imc2, idm, mcc, idmn, id, idn, inv_var, maxp, sum_avg, sum_ent, sum_squares};
}

/// Mean, per feature, over the 13 directions whose matrix is nonempty. Per-direction values
/// are sorted before summing so the result does not depend on direction order.
template <std::size_t N>
FeatureValues<N> average_sorted(const std::vector<FeatureValues<N>>& per_direction)
{
    FeatureValues<N> out{};
    for (std::size_t f = 0; f < N; ++f) {
        std::vector<double> vals;
        vals.reserve(per_direction.size());
        for (const auto& fv : per_direction) {
            vals.push_back(fv[f]);
        }
        std::sort(vals.begin(), vals.end());
        double s = 0.0;
        for (double v : vals) {
            s += v;
        }
        out[f] = s / static_cast<double>(vals.size());
    }
    return out;
}

inline FeatureValues<24> glcm_features(const DiscretizedRoi& d)
{
    std::vector<FeatureValues<24>> per;
    for (const auto& dir : kDirections) {
        const TextureMatrix m = glcm_matrix(d, dir);
        if (m.sum() > 0.0) {
            per.push_back(glcm_features_from_matrix(m));
        }
    }
    if (per.empty()) {
        return detail::glcm_degenerate();
    }
    return average_sorted(per);
}

} // namespace gliofuse::radiomics
