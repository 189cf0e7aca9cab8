#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/error.hpp"
#include "gliofuse/random.hpp"

namespace gliofuse::evaluation {

/// Held-out index sets of a K-fold partition, plus per-fold class counts (index 0 = LGG, 1 = HGG).
struct Folds {
    std::vector<std::vector<std::size_t>> test;
    std::vector<std::array<std::size_t, 2>> class_counts;
    std::size_t n_rows = 0;

    [[nodiscard]] std::size_t k() const noexcept { return test.size(); }

    [[nodiscard]] std::vector<std::size_t> train(std::size_t fold) const
    {
        std::vector<char> held(n_rows, 0);
        for (auto i : test.at(fold)) {
            held[i] = 1;
        }
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n_rows; ++i) {
            if (!held[i]) {
                out.push_back(i);
            }
        }
        return out;
    }

    friend bool operator==(const Folds&, const Folds&) = default;
};

/// Shuffles each class with its own seeded stream, then deals members round-robin.
/// The dealing position carries over from HGG to LGG so fold sizes stay within one of each other.
inline Folds stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed)
{
    if (k < 2) {
        throw Error(ErrorCode::InvalidConfig, "k must be at least 2");
    }
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw Error(ErrorCode::DegenerateLabels, "labels must be 0 or 1");
        }
        members[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    for (int c : {1, 0}) {
        if (members[static_cast<std::size_t>(c)].size() < k) {
            throw Error(ErrorCode::ClassTooSmall, std::string(c == 1 ? "HGG" : "LGG") + " has " +
                                                      std::to_string(members[static_cast<std::size_t>(c)].size()) +
                                                      " members, fewer than k = " + std::to_string(k));
        }
    }
    Folds f;
    f.n_rows = labels.size();
    f.test.resize(k);
    f.class_counts.assign(k, {0, 0});
    std::size_t pos = 0;
    for (int c : {1, 0}) {
        auto& m = members[static_cast<std::size_t>(c)];
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        shuffle(std::span<std::size_t>(m), rng);
        for (auto idx : m) {
            f.test[pos % k].push_back(idx);
            ++f.class_counts[pos % k][static_cast<std::size_t>(c)];
            ++pos;
        }
    }
    for (auto& t : f.test) {
        std::sort(t.begin(), t.end());
    }
    return f;
}

inline nlohmann::json to_json(const Folds& f)
{
    nlohmann::json j;
    j["n_rows"] = f.n_rows;
    j["test"] = f.test;
    j["class_counts"] = nlohmann::json::array();
    for (const auto& c : f.class_counts) {
        j["class_counts"].push_back({{"LGG", c[0]}, {"HGG", c[1]}});
    }
    return j;
}

inline Folds folds_from_json(const nlohmann::json& j)
{
    Folds f;
    f.n_rows = j.at("n_rows").get<std::size_t>();
    f.test = j.at("test").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& c : j.at("class_counts")) {
        f.class_counts.push_back({c.at("LGG").get<std::size_t>(), c.at("HGG").get<std::size_t>()});
    }
    return f;
}

} // namespace gliofuse::evaluation
