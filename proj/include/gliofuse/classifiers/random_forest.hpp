#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/classifiers/common.hpp"
#include "gliofuse/random.hpp"

namespace gliofuse::classifiers {

struct RfConfig {
    int n_trees = 1000;
    int max_features = 0; ///< 0 selects floor(sqrt(d)), at least 1
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    std::uint64_t seed = 0;

    friend bool operator==(const RfConfig&, const RfConfig&) = default;
};

/// Gini impurity of a two-class node.
inline double gini(std::size_t neg, std::size_t pos) noexcept
{
    const double n = static_cast<double>(neg + pos);
    if (n == 0.0) {
        return 0.0;
    }
    const double p0 = static_cast<double>(neg) / n;
    const double p1 = static_cast<double>(pos) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

/// Bagged Gini trees. Leaves hold a hard class vote (0 or 1).
struct RfModel {
    RfConfig config;
    std::size_t n_features = 0;
    std::vector<Tree> trees;
    std::vector<std::uint64_t> tree_seeds;

    [[nodiscard]] double vote_fraction(std::span<const double> x) const
    {
        check_width(x, n_features);
        std::size_t votes = 0;
        for (const auto& t : trees) {
            votes += t.evaluate(x) > 0.5 ? 1 : 0;
        }
        return static_cast<double>(votes) / static_cast<double>(trees.size());
    }

    [[nodiscard]] double predict_proba(std::span<const double> x) const { return vote_fraction(x); }
    [[nodiscard]] int predict(std::span<const double> x) const { return label_from_proba(predict_proba(x)); }
};

namespace detail {

class GiniTreeBuilder {
public:
    GiniTreeBuilder(const Matrix& x, std::span<const int> y, const RfConfig& cfg, std::size_t max_features, Rng& rng)
        : x_(x), y_(y), cfg_(cfg), max_features_(max_features), rng_(rng)
    {
    }

    Tree build(std::vector<std::size_t> rows)
    {
        grow(rows);
        return std::move(tree_);
    }

private:
    int leaf(std::size_t neg, std::size_t pos)
    {
        Tree::Node n;
        n.value = pos >= neg ? 1.0 : 0.0;
        tree_.nodes.push_back(n);
        return static_cast<int>(tree_.nodes.size() - 1);
    }

    int grow(std::vector<std::size_t>& rows)
    {
        std::size_t pos = 0;
        for (auto r : rows) {
            pos += static_cast<std::size_t>(y_[r]);
        }
        const std::size_t neg = rows.size() - pos;
        if (pos == 0 || neg == 0 || rows.size() < static_cast<std::size_t>(cfg_.min_samples_split)) {
            return leaf(neg, pos);
        }
        std::vector<std::size_t> features(x_.cols());
        std::iota(features.begin(), features.end(), 0);
        shuffle(std::span<std::size_t>(features), rng_);

        const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
        double best = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::size_t> order = rows;
        for (std::size_t fi = 0; fi < features.size(); ++fi) {
            // Keep drawing features past max_features only while no valid split exists.
            if (fi >= max_features_ && best_feature >= 0) {
                break;
            }
            const std::size_t f = features[fi];
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return x_(a, f) < x_(b, f); });
            std::size_t lpos = 0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                lpos += static_cast<std::size_t>(y_[order[i]]);
                const double v = x_(order[i], f);
                const double next = x_(order[i + 1], f);
                const std::size_t nl = i + 1;
                const std::size_t nr = order.size() - nl;
                if (!(v < next) || nl < min_leaf || nr < min_leaf) {
                    continue;
                }
                const std::size_t lneg = nl - lpos;
                const std::size_t rpos = pos - lpos;
                const std::size_t rneg = nr - rpos;
                const double impurity = (static_cast<double>(nl) * gini(lneg, lpos) +
                                         static_cast<double>(nr) * gini(rneg, rpos)) /
                                        static_cast<double>(order.size());
                if (impurity < best) {
                    best = impurity;
                    best_feature = static_cast<int>(f);
                    best_threshold = v + (next - v) / 2.0;
                    if (!(best_threshold < next)) {
                        best_threshold = v;
                    }
                }
            }
        }
        if (best_feature < 0) {
            return leaf(neg, pos);
        }
        const auto f = static_cast<std::size_t>(best_feature);
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (x_(r, f) <= best_threshold ? left : right).push_back(r);
        }
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const int l = grow(left);
        const int rr = grow(right);
        auto& n = tree_.nodes[static_cast<std::size_t>(id)];
        n.feature = best_feature;
        n.threshold = best_threshold;
        n.left = l;
        n.right = rr;
        return id;
    }

    const Matrix& x_;
    std::span<const int> y_;
    const RfConfig& cfg_;
    std::size_t max_features_;
    Rng& rng_;
    Tree tree_;
};

} // namespace detail

inline std::size_t rf_max_features(const RfConfig& cfg, std::size_t d)
{
    if (cfg.max_features > 0) {
        return std::min<std::size_t>(static_cast<std::size_t>(cfg.max_features), d);
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
}

/// Grows one tree on a bootstrap resample drawn from `seed`.
inline Tree train_rf_tree(const TrainSet& data, const RfConfig& cfg, std::uint64_t seed)
{
    Rng rng(seed);
    const std::size_t n = data.rows();
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) {
        r = static_cast<std::size_t>(uniform_index(rng, n));
    }
    std::sort(rows.begin(), rows.end());
    return detail::GiniTreeBuilder(data.x, data.y, cfg, rf_max_features(cfg, data.cols()), rng).build(std::move(rows));
}

inline RfModel train_rf(const TrainSet& data, const RfConfig& cfg = {})
{
    data.validate();
    RfModel m;
    m.config = cfg;
    m.n_features = data.cols();
    for (int t = 0; t < cfg.n_trees; ++t) {
        const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
        m.tree_seeds.push_back(s);
        m.trees.push_back(train_rf_tree(data, cfg, s));
    }
    return m;
}

inline nlohmann::json to_json(const RfModel& m)
{
    nlohmann::json j;
    j["type"] = "rf";
    j["config"] = {{"n_trees", m.config.n_trees},
                   {"max_features", m.config.max_features},
                   {"min_samples_split", m.config.min_samples_split},
                   {"min_samples_leaf", m.config.min_samples_leaf},
                   {"seed", m.config.seed}};
    j["n_features"] = m.n_features;
    j["tree_seeds"] = m.tree_seeds;
    j["trees"] = nlohmann::json::array();
    for (const auto& t : m.trees) {
        j["trees"].push_back(tree_to_json(t));
    }
    return j;
}

inline RfModel rf_from_json(const nlohmann::json& j)
{
    RfModel m;
    const auto& c = j.at("config");
    m.config.n_trees = c.at("n_trees").get<int>();
    m.config.max_features = c.at("max_features").get<int>();
    m.config.min_samples_split = c.at("min_samples_split").get<int>();
    m.config.min_samples_leaf = c.at("min_samples_leaf").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : j.at("trees")) {
        m.trees.push_back(tree_from_json(t));
    }
    return m;
}

} // namespace gliofuse::classifiers
