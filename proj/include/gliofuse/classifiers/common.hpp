#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/error.hpp"
#include "gliofuse/linalg.hpp"

namespace gliofuse::classifiers {

/// Rows of `x` with labels in {0 = LGG, 1 = HGG}.
struct TrainSet {
    Matrix x;
    std::vector<int> y;

    [[nodiscard]] std::size_t rows() const noexcept { return x.rows(); }
    [[nodiscard]] std::size_t cols() const noexcept { return x.cols(); }

    void validate() const
    {
        if (y.size() != x.rows()) {
            throw Error(ErrorCode::LengthMismatch, "label count differs from row count");
        }
        if (x.rows() < 2) {
            throw Error(ErrorCode::TooFewRows, "training needs at least 2 rows");
        }
        std::size_t pos = 0;
        for (int v : y) {
            if (v != 0 && v != 1) {
                throw Error(ErrorCode::DegenerateLabels, "labels must be 0 or 1");
            }
            pos += static_cast<std::size_t>(v);
        }
        if (pos == 0 || pos == y.size()) {
            throw Error(ErrorCode::DegenerateLabels, "training labels contain a single class");
        }
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (double v : x.row(r)) {
                if (!std::isfinite(v)) {
                    throw Error(ErrorCode::NonFiniteValue, "training matrix has a non-finite value");
                }
            }
        }
    }
};

inline double sigmoid(double z) noexcept
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Probability threshold shared by every model; exactly 0.5 goes to HGG.
inline int label_from_proba(double p) noexcept { return p >= 0.5 ? 1 : 0; }

inline void check_width(std::span<const double> x, std::size_t d)
{
    if (x.size() != d) {
        throw Error(ErrorCode::WidthMismatch,
                    "input has " + std::to_string(x.size()) + " features, model expects " + std::to_string(d));
    }
}

/// Binary decision tree in flat form. Leaves have feature == -1.
struct Tree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;

        friend bool operator==(const Node&, const Node&) = default;
    };
    std::vector<Node> nodes;

    [[nodiscard]] double evaluate(std::span<const double> x) const noexcept
    {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const auto& n = nodes[static_cast<std::size_t>(i)];
            i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }

    [[nodiscard]] int depth(int i = 0) const noexcept
    {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        if (n.feature < 0) {
            return 0;
        }
        return 1 + std::max(depth(n.left), depth(n.right));
    }

    [[nodiscard]] std::size_t leaf_count() const noexcept
    {
        std::size_t c = 0;
        for (const auto& n : nodes) {
            c += n.feature < 0 ? 1 : 0;
        }
        return c;
    }

    friend bool operator==(const Tree&, const Tree&) = default;
};

/// Nested-node JSON: {"leaf": v} or {"feature", "threshold", "left", "right"}.
inline nlohmann::json tree_to_json(const Tree& t, int i = 0)
{
    const auto& n = t.nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) {
        return {{"leaf", n.value}};
    }
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", tree_to_json(t, n.left)},
            {"right", tree_to_json(t, n.right)}};
}

inline int tree_from_json_into(Tree& t, const nlohmann::json& j)
{
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (j.contains("leaf")) {
        t.nodes[static_cast<std::size_t>(id)].value = j.at("leaf").get<double>();
        return id;
    }
    Tree::Node n;
    n.feature = j.at("feature").get<int>();
    n.threshold = j.at("threshold").get<double>();
    n.left = tree_from_json_into(t, j.at("left"));
    n.right = tree_from_json_into(t, j.at("right"));
    t.nodes[static_cast<std::size_t>(id)] = n;
    return id;
}

inline Tree tree_from_json(const nlohmann::json& j)
{
    Tree t;
    tree_from_json_into(t, j);
    return t;
}

} // namespace gliofuse::classifiers
