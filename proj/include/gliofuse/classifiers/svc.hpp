#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/classifiers/common.hpp"

namespace gliofuse::classifiers {

struct SvcConfig {
    double c = 1.0;
    double tolerance = 1e-3;
    double gamma = 0.0; ///< 0 selects 1 / (d * variance of all training values)
    bool shrinking = true;
    long max_iterations = 10'000'000;

    /// Loose KKT tolerance (1e-1): faster, less precise fits.
    static SvcConfig coarse_tolerance()
    {
        SvcConfig c;
        c.tolerance = 1e-1;
        return c;
    }

    friend bool operator==(const SvcConfig&, const SvcConfig&) = default;
};

/// RBF soft-margin SVM: f(x) = sum_i coef_i K(sv_i, x) + b, with coef_i = y_i a_i (y in {-1, +1}).
/// Probabilities come from a Platt sigmoid P(HGG) = 1 / (1 + exp(A f + B)).
struct SvcModel {
    SvcConfig config;
    std::size_t n_features = 0;
    double gamma = 1.0;
    Matrix support_vectors;
    std::vector<double> coef;
    double bias = 0.0;
    double platt_a = -1.0;
    double platt_b = 0.0;
    long iterations = 0;
    double kkt_gap = 0.0;

    [[nodiscard]] double kernel(std::span<const double> a, std::span<const double> b) const noexcept
    {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            d2 += d * d;
        }
        return std::exp(-gamma * d2);
    }

    [[nodiscard]] double decision(std::span<const double> x) const
    {
        check_width(x, n_features);
        double s = bias;
        for (std::size_t i = 0; i < coef.size(); ++i) {
            s += coef[i] * kernel(support_vectors.row(i), x);
        }
        return s;
    }

    [[nodiscard]] double proba_from_decision(double f) const noexcept { return sigmoid(-(platt_a * f + platt_b)); }
    [[nodiscard]] double predict_proba(std::span<const double> x) const { return proba_from_decision(decision(x)); }
    [[nodiscard]] int predict(std::span<const double> x) const { return label_from_proba(predict_proba(x)); }
};

/// 1 / (d * var) over every entry of `x`; 1 when the matrix is constant.
inline double scale_gamma(const Matrix& x)
{
    const double count = static_cast<double>(x.rows() * x.cols());
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (double v : x.row(r)) {
            mean += v;
        }
    }
    mean /= count;
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (double v : x.row(r)) {
            var += (v - mean) * (v - mean);
        }
    }
    var /= count;
    return var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

namespace detail {

/// Platt sigmoid fit with regularized targets (Newton with backtracking line search).
inline std::pair<double, double> fit_platt(std::span<const double> f, std::span<const int> y)
{
    double prior1 = 0.0;
    for (int v : y) {
        prior1 += v;
    }
    const double prior0 = static_cast<double>(y.size()) - prior1;
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    const std::size_t n = y.size();
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = y[i] == 1 ? hi : lo;
    }
    constexpr int kMaxIter = 100;
    constexpr double kMinStep = 1e-10;
    constexpr double kSigma = 1e-12;
    constexpr double kEps = 1e-5;
    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto objective = [&](double aa, double bb) {
        double fv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double fa = f[i] * aa + bb;
            fv += fa >= 0.0 ? t[i] * fa + std::log1p(std::exp(-fa)) : (t[i] - 1.0) * fa + std::log1p(std::exp(fa));
        }
        return fv;
    };
    double fval = objective(a, b);
    for (int it = 0; it < kMaxIter; ++it) {
        double h11 = kSigma;
        double h22 = kSigma;
        double h21 = 0.0;
        double g1 = 0.0;
        double g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double fa = f[i] * a + b;
            double p = 0.0;
            double q = 0.0;
            if (fa >= 0.0) {
                p = std::exp(-fa) / (1.0 + std::exp(-fa));
                q = 1.0 / (1.0 + std::exp(-fa));
            } else {
                p = 1.0 / (1.0 + std::exp(fa));
                q = std::exp(fa) / (1.0 + std::exp(fa));
            }
            const double d2 = p * q;
            h11 += f[i] * f[i] * d2;
            h22 += d2;
            h21 += f[i] * d2;
            const double d1 = t[i] - p;
            g1 += f[i] * d1;
            g2 += d1;
        }
        if (std::fabs(g1) < kEps && std::fabs(g2) < kEps) {
            break;
        }
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;
        double step = 1.0;
        while (step >= kMinStep) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if (step < kMinStep) {
            break;
        }
    }
    return {a, b};
}

} // namespace detail

/// SMO with second-order working-set selection on a precomputed kernel matrix.
inline SvcModel train_svc(const TrainSet& data, const SvcConfig& cfg = {})
{
    data.validate();
    const std::size_t n = data.rows();
    SvcModel m;
    m.config = cfg;
    m.n_features = data.cols();
    m.gamma = cfg.gamma > 0.0 ? cfg.gamma : scale_gamma(data.x);

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = data.y[i] == 1 ? 1.0 : -1.0;
    }
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        k[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            k[i * n + j] = k[j * n + i] = m.kernel(data.x.row(i), data.x.row(j));
        }
    }
    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * k[i * n + j]; };

    const double c = cfg.c;
    constexpr double kTau = 1e-12;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    std::vector<char> active(n, 1);
    auto is_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); };
    auto is_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); };

    // Returns false when the active set satisfies the KKT tolerance.
    auto select = [&](std::size_t& out_i, std::size_t& out_j, double& gap) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (active[t] && is_up(t) && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        std::size_t j = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (!active[t] || !is_low(t)) {
                continue;
            }
            const double v = -y[t] * grad[t];
            gmin = std::min(gmin, v);
            if (i == n) {
                continue;
            }
            const double b = gmax - v;
            if (b > 0.0) {
                double a = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * k[i * n + t];
                if (a <= 0.0) {
                    a = kTau;
                }
                const double obj = -(b * b) / a;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        gap = gmax - gmin;
        out_i = i;
        out_j = j;
        return i != n && j != n && gap >= cfg.tolerance;
    };

    auto shrink = [&]() {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (is_up(t)) {
                gmax = std::max(gmax, -y[t] * grad[t]);
            }
            if (is_low(t)) {
                gmin = std::min(gmin, -y[t] * grad[t]);
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            const bool at_upper_bound = is_low(t) && !is_up(t);
            const bool at_lower_bound = is_up(t) && !is_low(t);
            if ((at_upper_bound && v > gmax) || (at_lower_bound && v < gmin)) {
                active[t] = 0;
            }
        }
    };

    const long shrink_every = static_cast<long>(std::min<std::size_t>(n, 1000));
    long iter = 0;
    double gap = 0.0;
    bool unshrunk = false;
    while (iter < cfg.max_iterations) {
        if (cfg.shrinking && iter > 0 && iter % shrink_every == 0 && !unshrunk) {
            shrink();
        }
        std::size_t i = 0;
        std::size_t j = 0;
        if (!select(i, j, gap)) {
            // Gradients are exact for every index, so restoring the full set only re-checks optimality.
            if (std::find(active.begin(), active.end(), 0) != active.end()) {
                std::fill(active.begin(), active.end(), 1);
                unshrunk = true;
                continue;
            }
            break;
        }
        ++iter;
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        double a = q(i, i) + q(j, j) - 2.0 * y[i] * y[j] * k[i * n + j];
        if (a <= 0.0) {
            a = kTau;
        }
        const double b = -y[i] * grad[i] + y[j] * grad[j];
        double ai = alpha[i] + y[i] * b / a;
        double aj = alpha[j] - y[j] * b / a;
        const double sum = y[i] * old_ai + y[j] * old_aj;
        ai = std::clamp(ai, 0.0, c);
        aj = y[j] * (sum - y[i] * ai);
        aj = std::clamp(aj, 0.0, c);
        ai = y[i] * (sum - y[j] * aj);
        ai = std::clamp(ai, 0.0, c);
        alpha[i] = ai;
        alpha[j] = aj;
        const double di = ai - old_ai;
        const double dj = aj - old_aj;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }
    m.iterations = iter;
    m.kkt_gap = gap;

    // Bias from free vectors, else the midpoint of the feasible interval.
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < c) {
            free_sum += yg;
            ++free_count;
        } else if ((y[t] > 0 && alpha[t] >= c) || (y[t] < 0 && alpha[t] <= 0.0)) {
            lb = std::max(lb, yg);
        } else {
            ub = std::min(ub, yg);
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
    m.bias = -rho;

    std::size_t nsv = 0;
    for (double a : alpha) {
        nsv += a > 0.0 ? 1 : 0;
    }
    m.support_vectors = Matrix(nsv, m.n_features);
    std::size_t r = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            std::copy(data.x.row(t).begin(), data.x.row(t).end(), m.support_vectors.row(r).begin());
            m.coef.push_back(y[t] * alpha[t]);
            ++r;
        }
    }

    std::vector<double> f(n);
    for (std::size_t t = 0; t < n; ++t) {
        double s = m.bias;
        for (std::size_t u = 0; u < n; ++u) {
            s += y[u] * alpha[u] * k[u * n + t];
        }
        f[t] = s;
    }
    std::tie(m.platt_a, m.platt_b) = detail::fit_platt(f, data.y);
    return m;
}

inline nlohmann::json to_json(const SvcModel& m)
{
    nlohmann::json j;
    j["type"] = "svc";
    j["config"] = {{"c", m.config.c},
                   {"tolerance", m.config.tolerance},
                   {"gamma", m.config.gamma},
                   {"shrinking", m.config.shrinking},
                   {"max_iterations", m.config.max_iterations}};
    j["n_features"] = m.n_features;
    j["gamma"] = m.gamma;
    j["bias"] = m.bias;
    j["platt_a"] = m.platt_a;
    j["platt_b"] = m.platt_b;
    j["coef"] = m.coef;
    j["support_vectors"] = nlohmann::json::array();
    for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
        const auto row = m.support_vectors.row(i);
        j["support_vectors"].push_back(std::vector<double>(row.begin(), row.end()));
    }
    return j;
}

inline SvcModel svc_from_json(const nlohmann::json& j)
{
    SvcModel m;
    const auto& c = j.at("config");
    m.config.c = c.at("c").get<double>();
    m.config.tolerance = c.at("tolerance").get<double>();
    m.config.gamma = c.at("gamma").get<double>();
    m.config.shrinking = c.at("shrinking").get<bool>();
    m.config.max_iterations = c.at("max_iterations").get<long>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.gamma = j.at("gamma").get<double>();
    m.bias = j.at("bias").get<double>();
    m.platt_a = j.at("platt_a").get<double>();
    m.platt_b = j.at("platt_b").get<double>();
    m.coef = j.at("coef").get<std::vector<double>>();
    const auto& sv = j.at("support_vectors");
    m.support_vectors = Matrix(sv.size(), m.n_features);
    for (std::size_t i = 0; i < sv.size(); ++i) {
        for (std::size_t f = 0; f < m.n_features; ++f) {
            m.support_vectors(i, f) = sv[i][f].get<double>();
        }
    }
    return m;
}

} // namespace gliofuse::classifiers
