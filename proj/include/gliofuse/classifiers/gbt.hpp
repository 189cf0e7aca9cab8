#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/classifiers/common.hpp"

namespace gliofuse::classifiers {

struct GbtConfig {
    int n_trees = 1000;
    int max_depth = 6;
    double learning_rate = 0.3;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;

    friend bool operator==(const GbtConfig&, const GbtConfig&) = default;
};

/// Gradient-boosted regression trees on the logistic loss. Leaves already include the learning rate.
struct GbtModel {
    GbtConfig config;
    std::size_t n_features = 0;
    double base_score = 0.0;
    std::vector<Tree> trees;
    std::vector<double> train_logloss; ///< entry r is the loss after r trees

    [[nodiscard]] double margin(std::span<const double> x) const
    {
        check_width(x, n_features);
        double s = base_score;
        for (const auto& t : trees) {
            s += t.evaluate(x);
        }
        return s;
    }

    [[nodiscard]] double predict_proba(std::span<const double> x) const { return sigmoid(margin(x)); }
    [[nodiscard]] int predict(std::span<const double> x) const { return label_from_proba(predict_proba(x)); }
};

namespace detail {

inline double logloss(std::span<const double> margin, std::span<const int> y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        // log(1 + exp(-z)) for the positive class, log(1 + exp(z)) for the negative class.
        const double z = y[i] == 1 ? margin[i] : -margin[i];
        s += z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    }
    return s / static_cast<double>(y.size());
}

class GbtTreeBuilder {
public:
    GbtTreeBuilder(const Matrix& x, std::span<const double> g, std::span<const double> h, const GbtConfig& cfg)
        : x_(x), g_(g), h_(h), cfg_(cfg)
    {
    }

    Tree build()
    {
        std::vector<std::size_t> rows(x_.rows());
        std::iota(rows.begin(), rows.end(), 0);
        grow(rows, 0);
        return std::move(tree_);
    }

private:
    [[nodiscard]] double score(double g, double h) const { return g * g / (h + cfg_.lambda); }

    int make_leaf(double g, double h)
    {
        Tree::Node n;
        n.value = -g / (h + cfg_.lambda) * cfg_.learning_rate;
        tree_.nodes.push_back(n);
        return static_cast<int>(tree_.nodes.size() - 1);
    }

    int grow(std::vector<std::size_t>& rows, int depth)
    {
        double g = 0.0;
        double h = 0.0;
        for (auto r : rows) {
            g += g_[r];
            h += h_[r];
        }
        if (depth >= cfg_.max_depth || rows.size() < 2) {
            return make_leaf(g, h);
        }
        const double parent = score(g, h);
        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::size_t> order = rows;
        for (std::size_t f = 0; f < x_.cols(); ++f) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return x_(a, f) < x_(b, f); });
            double gl = 0.0;
            double hl = 0.0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                gl += g_[order[i]];
                hl += h_[order[i]];
                const double v = x_(order[i], f);
                const double next = x_(order[i + 1], f);
                if (!(v < next)) {
                    continue;
                }
                const double gr = g - gl;
                const double hr = h - hl;
                if (hl < cfg_.min_child_weight || hr < cfg_.min_child_weight) {
                    continue;
                }
                const double gain = 0.5 * (score(gl, hl) + score(gr, hr) - parent) - cfg_.gamma;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = v + (next - v) / 2.0;
                }
            }
        }
        if (best_feature < 0) {
            return make_leaf(g, h);
        }
        const auto f = static_cast<std::size_t>(best_feature);
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (x_(r, f) <= best_threshold ? left : right).push_back(r);
        }
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const int l = grow(left, depth + 1);
        const int rr = grow(right, depth + 1);
        auto& n = tree_.nodes[static_cast<std::size_t>(id)];
        n.feature = best_feature;
        n.threshold = best_threshold;
        n.left = l;
        n.right = rr;
        return id;
    }

    const Matrix& x_;
    std::span<const double> g_;
    std::span<const double> h_;
    const GbtConfig& cfg_;
    Tree tree_;
};

} // namespace detail

/// Newton boosting with exact greedy splits. Deterministic: no row or column subsampling.
inline GbtModel train_gbt(const TrainSet& data, const GbtConfig& cfg = {})
{
    data.validate();
    const std::size_t n = data.rows();
    GbtModel m;
    m.config = cfg;
    m.n_features = data.cols();
    const double pos = static_cast<double>(std::count(data.y.begin(), data.y.end(), 1));
    m.base_score = std::log(pos / (static_cast<double>(n) - pos));

    std::vector<double> margin(n, m.base_score);
    std::vector<double> g(n);
    std::vector<double> h(n);
    m.train_logloss.push_back(detail::logloss(margin, data.y));
    for (int t = 0; t < cfg.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            g[i] = p - static_cast<double>(data.y[i]);
            h[i] = std::max(p * (1.0 - p), 1e-16);
        }
        Tree tree = detail::GbtTreeBuilder(data.x, g, h, cfg).build();
        std::vector<double> next = margin;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] += tree.evaluate(data.x.row(i));
        }
        const double loss = detail::logloss(next, data.y);
        if (loss > m.train_logloss.back()) {
            // A round that does not help (rounding noise once gradients vanish) becomes a zero tree.
            tree = Tree{{Tree::Node{}}};
        } else {
            margin = std::move(next);
        }
        m.trees.push_back(std::move(tree));
        m.train_logloss.push_back(std::min(loss, m.train_logloss[m.train_logloss.size() - 1]));
    }
    return m;
}

inline nlohmann::json to_json(const GbtModel& m)
{
    nlohmann::json j;
    j["type"] = "gbt";
    j["config"] = {{"n_trees", m.config.n_trees},
                   {"max_depth", m.config.max_depth},
                   {"learning_rate", m.config.learning_rate},
                   {"lambda", m.config.lambda},
                   {"gamma", m.config.gamma},
                   {"min_child_weight", m.config.min_child_weight}};
    j["n_features"] = m.n_features;
    j["base_score"] = m.base_score;
    j["trees"] = nlohmann::json::array();
    for (const auto& t : m.trees) {
        j["trees"].push_back(tree_to_json(t));
    }
    return j;
}

inline GbtModel gbt_from_json(const nlohmann::json& j)
{
    GbtModel m;
    const auto& c = j.at("config");
    m.config.n_trees = c.at("n_trees").get<int>();
    m.config.max_depth = c.at("max_depth").get<int>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.lambda = c.at("lambda").get<double>();
    m.config.gamma = c.at("gamma").get<double>();
    m.config.min_child_weight = c.at("min_child_weight").get<double>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.base_score = j.at("base_score").get<double>();
    for (const auto& t : j.at("trees")) {
        m.trees.push_back(tree_from_json(t));
    }
    return m;
}

} // namespace gliofuse::classifiers
