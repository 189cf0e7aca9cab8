#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include "gliofuse/radiomics/discretize.hpp"
#include "gliofuse/radiomics/texture_matrix.hpp"

namespace gliofuse::radiomics {

inline constexpr std::array<std::string_view, 18> kFirstOrderNames{
    "Energy", "TotalEnergy", "Entropy", "Minimum", "10Percentile", "90Percentile",
    "Maximum", "Mean", "Median", "InterquartileRange", "Range", "MeanAbsoluteDeviation",
    "RobustMeanAbsoluteDeviation", "RootMeanSquared", "Skewness", "Kurtosis", "Variance", "Uniformity",
};

/// Percentile of sorted data by linear interpolation between closest ranks (q in [0, 1]).
inline double percentile_sorted(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) {
        return 0.0;
    }
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Intensity statistics over masked voxels. Entropy and Uniformity use the discretized
/// histogram `disc`; higher moments of a zero-variance ROI are 0; kurtosis is not excess.
inline FeatureValues<18> first_order_features(const MaskedVolume& mv, const DiscretizedRoi& disc)
{
    std::vector<double> v = mv.values();
    const auto n = static_cast<double>(v.size());
    std::sort(v.begin(), v.end());

    double energy = 0.0;
    double sum = 0.0;
    for (double x : v) {
        energy += x * x;
        sum += x;
    }
    const double mean = sum / n;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    double mad = 0.0;
    for (double x : v) {
        const double dev = x - mean;
        m2 += dev * dev;
        m3 += dev * dev * dev;
        m4 += dev * dev * dev * dev;
        mad += std::fabs(dev);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    mad /= n;

    const double p10 = percentile_sorted(v, 0.10);
    const double p90 = percentile_sorted(v, 0.90);
    double robust_sum = 0.0;
    std::size_t robust_n = 0;
    for (double x : v) {
        if (x >= p10 && x <= p90) {
            robust_sum += x;
            ++robust_n;
        }
    }
    // Tiny ROIs can leave no voxel between the interpolated percentiles; report 0 then.
    double rmad = 0.0;
    if (robust_n > 0) {
        const double robust_mean = robust_sum / static_cast<double>(robust_n);
        for (double x : v) {
            if (x >= p10 && x <= p90) {
                rmad += std::fabs(x - robust_mean);
            }
        }
        rmad /= static_cast<double>(robust_n);
    }

    std::vector<double> hist(static_cast<std::size_t>(disc.ng), 0.0);
    for (int l : disc.labels) {
        if (l > 0) {
            hist[static_cast<std::size_t>(l - 1)] += 1.0;
        }
    }
    double entropy = 0.0;
    double uniformity = 0.0;
    const double total = static_cast<double>(disc.voxel_count());
    for (double c : hist) {
        const double p = c / total;
        entropy -= detail::plogp(p);
        uniformity += p * p;
    }

    const bool flat = m2 <= 0.0;
    return {
        energy,
        energy * mv.image->spacing().voxel_volume(),
        entropy,
        v.front(),
        p10,
        p90,
        v.back(),
        mean,
        percentile_sorted(v, 0.5),
        percentile_sorted(v, 0.75) - percentile_sorted(v, 0.25),
        v.back() - v.front(),
        mad,
        rmad,
        std::sqrt(energy / n),
        flat ? 0.0 : m3 / std::pow(m2, 1.5),
        flat ? 0.0 : m4 / (m2 * m2),
        m2,
        uniformity,
    };
}

} // namespace gliofuse::radiomics
