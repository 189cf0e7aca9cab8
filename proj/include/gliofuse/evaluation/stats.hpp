#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/error.hpp"

namespace gliofuse::evaluation {

/// Product-moment correlation.
inline double pearson_r(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw Error(ErrorCode::LengthMismatch, "pearson_r inputs differ in length");
    }
    if (x.size() < 2) {
        throw Error(ErrorCode::TooFew, "pearson_r needs at least 2 pairs");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorCode::ZeroVariance, "pearson_r input has zero variance");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Linear-interpolation quantile of sorted data (q in [0, 1]).
inline double quantile_sorted(std::span<const double> sorted, double q)
{
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Box-plot summary.
struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double skewness = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers;
};

/// Skewness is the adjusted Fisher-Pearson coefficient; 0 for n = 2 or constant data.
/// Whiskers reach the most extreme values within 1.5 IQR of the quartiles.
inline DescriptiveStats descriptive_stats(std::span<const double> values)
{
    if (values.size() < 2) {
        throw Error(ErrorCode::TooFew, "descriptive statistics need at least 2 values");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    DescriptiveStats s;
    s.n = v.size();
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    s.mean = sum / n;
    s.median = quantile_sorted(v, 0.5);
    s.q1 = quantile_sorted(v, 0.25);
    s.q3 = quantile_sorted(v, 0.75);
    s.iqr = s.q3 - s.q1;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : v) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if (m2 > 0.0 && v.size() > 2) {
        const double g1 = m3 / std::pow(m2, 1.5);
        s.skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
    }
    const double lo = s.q1 - 1.5 * s.iqr;
    const double hi = s.q3 + 1.5 * s.iqr;
    s.whisker_low = s.q1;
    s.whisker_high = s.q3;
    for (double x : v) {
        if (x < lo || x > hi) {
            s.outliers.push_back(x);
        } else {
            s.whisker_low = std::min(s.whisker_low, x);
            s.whisker_high = std::max(s.whisker_high, x);
        }
    }
    return s;
}

inline nlohmann::json to_json(const DescriptiveStats& s)
{
    return {{"n", s.n},
            {"mean", s.mean},
            {"median", s.median},
            {"q1", s.q1},
            {"q3", s.q3},
            {"iqr", s.iqr},
            {"skewness", s.skewness},
            {"whisker_low", s.whisker_low},
            {"whisker_high", s.whisker_high},
            {"outliers", s.outliers}};
}

} // namespace gliofuse::evaluation
