#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/error.hpp"
#include "gliofuse/feature_table.hpp"
#include "gliofuse/linalg.hpp"

namespace gliofuse::pca {

struct PcaModel {
    std::vector<std::string> feature_names;
    std::vector<double> mean;
    std::vector<double> scale;  ///< 1 for every column when not standardized
    Matrix components;          ///< p x p, column k is component k+1
    std::vector<double> eigenvalues;
    std::vector<double> explained_ratio;
    bool standardized = true;

    [[nodiscard]] std::size_t dimension() const noexcept { return mean.size(); }
};

/// Centers (and optionally z-scores) columns, then eigendecomposes the sample covariance.
/// Columns with zero variance keep scale 1. Each component is signed so its largest-magnitude
/// loading is positive.
inline PcaModel fit_pca(const Matrix& x, std::vector<std::string> names, bool standardize = true)
{
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (n < 2) {
        throw Error(ErrorCode::TooFewRows, "PCA needs at least 2 rows, got " + std::to_string(n));
    }
    PcaModel m;
    m.standardized = standardize;
    m.feature_names = names.empty() ? std::vector<std::string>(p) : std::move(names);
    m.mean.assign(p, 0.0);
    m.scale.assign(p, 1.0);
    for (std::size_t c = 0; c < p; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            s += x(r, c);
        }
        m.mean[c] = s / static_cast<double>(n);
        if (standardize) {
            double v = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                v += (x(r, c) - m.mean[c]) * (x(r, c) - m.mean[c]);
            }
            const double sd = std::sqrt(v / static_cast<double>(n - 1));
            m.scale[c] = sd > 0.0 ? sd : 1.0;
        }
    }
    Matrix z(n, p);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            z(r, c) = (x(r, c) - m.mean[c]) / m.scale[c];
        }
    }
    Matrix cov(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                s += z(r, a) * z(r, b);
            }
            cov(a, b) = cov(b, a) = s / static_cast<double>(n - 1);
        }
    }
    auto eig = jacobi_eigen(std::move(cov));
    m.components = std::move(eig.vectors);
    m.eigenvalues = std::move(eig.values);
    for (double& l : m.eigenvalues) {
        l = std::max(l, 0.0);
    }
    for (std::size_t k = 0; k < p; ++k) {
        std::size_t arg = 0;
        for (std::size_t r = 1; r < p; ++r) {
            if (std::fabs(m.components(r, k)) > std::fabs(m.components(arg, k))) {
                arg = r;
            }
        }
        if (m.components(arg, k) < 0.0) {
            for (std::size_t r = 0; r < p; ++r) {
                m.components(r, k) = -m.components(r, k);
            }
        }
    }
    double total = 0.0;
    for (double l : m.eigenvalues) {
        total += l;
    }
    m.explained_ratio.assign(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        m.explained_ratio[k] = total > 0.0 ? m.eigenvalues[k] / total : (k == 0 ? 1.0 : 0.0);
    }
    return m;
}

inline PcaModel fit_pca(const FeatureTable& t, bool standardize = true)
{
    return fit_pca(t.matrix(), t.column_names, standardize);
}

/// Scores T = standardized(X) * W[:, 0..k).
inline Matrix transform(const PcaModel& m, const Matrix& x, std::size_t k)
{
    if (k > m.dimension()) {
        throw Error(ErrorCode::KTooLarge, "requested " + std::to_string(k) + " of " + std::to_string(m.dimension()) + " components");
    }
    if (x.cols() != m.dimension()) {
        throw Error(ErrorCode::WidthMismatch, "table width differs from the fitted model");
    }
    Matrix t(x.rows(), k);
    std::vector<double> z(m.dimension());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < m.dimension(); ++c) {
            z[c] = (x(r, c) - m.mean[c]) / m.scale[c];
        }
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < m.dimension(); ++c) {
                s += z[c] * m.components(c, j);
            }
            t(r, j) = s;
        }
    }
    return t;
}

/// Maps scores back to feature space: X = T * W[:, 0..k)^T, un-standardized.
inline Matrix inverse_transform(const PcaModel& m, const Matrix& scores)
{
    const std::size_t k = scores.cols();
    Matrix x(scores.rows(), m.dimension());
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        for (std::size_t c = 0; c < m.dimension(); ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                s += scores(r, j) * m.components(c, j);
            }
            x(r, c) = s * m.scale[c] + m.mean[c];
        }
    }
    return x;
}

struct ScreeRow {
    std::size_t component = 0; ///< 1-based
    double ratio = 0.0;
    double cumulative = 0.0;
};

inline std::vector<ScreeRow> scree_report(const PcaModel& m)
{
    std::vector<ScreeRow> out;
    double cum = 0.0;
    for (std::size_t k = 0; k < m.explained_ratio.size(); ++k) {
        cum += m.explained_ratio[k];
        out.push_back({k + 1, m.explained_ratio[k], cum});
    }
    return out;
}

/// Smallest k whose cumulative explained ratio reaches `threshold` (0 < threshold <= 1).
inline std::size_t select_components(const PcaModel& m, double threshold)
{
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "variance threshold must be in (0, 1]");
    }
    double cum = 0.0;
    for (std::size_t k = 0; k < m.explained_ratio.size(); ++k) {
        cum += m.explained_ratio[k];
        // Cumulative sums can land a few ulps under 1.0.
        if (cum >= threshold - 1e-12) {
            return k + 1;
        }
    }
    return m.explained_ratio.size();
}

/// The `k` loadings of `component` (1-based) with the largest magnitude, largest first.
inline std::vector<std::pair<std::string, double>> top_loadings(const PcaModel& m, std::size_t component, std::size_t k)
{
    if (component < 1 || component > m.dimension()) {
        throw Error(ErrorCode::KTooLarge, "component index out of range");
    }
    std::vector<std::pair<std::string, double>> all;
    for (std::size_t r = 0; r < m.dimension(); ++r) {
        all.emplace_back(m.feature_names[r], m.components(r, component - 1));
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return std::fabs(a.second) > std::fabs(b.second); });
    all.resize(std::min(k, all.size()));
    return all;
}

inline nlohmann::json to_json(const PcaModel& m)
{
    nlohmann::json j;
    j["standardized"] = m.standardized;
    j["feature_names"] = m.feature_names;
    j["mean"] = m.mean;
    j["scale"] = m.scale;
    j["eigenvalues"] = m.eigenvalues;
    j["explained_ratio"] = m.explained_ratio;
    j["components"] = nlohmann::json::array();
    for (std::size_t k = 0; k < m.components.cols(); ++k) {
        j["components"].push_back(m.components.col(k));
    }
    return j;
}

inline PcaModel pca_from_json(const nlohmann::json& j)
{
    PcaModel m;
    m.standardized = j.at("standardized").get<bool>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    m.explained_ratio = j.at("explained_ratio").get<std::vector<double>>();
    const auto& comps = j.at("components");
    m.components = Matrix(m.mean.size(), comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        for (std::size_t r = 0; r < m.mean.size(); ++r) {
            m.components(r, k) = comps[k][r].get<double>();
        }
    }
    return m;
}

} // namespace gliofuse::pca
