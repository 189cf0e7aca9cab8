#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/error.hpp"

namespace gliofuse::evaluation {

/// HGG (label 1) is the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;

    [[nodiscard]] std::size_t total() const noexcept { return tp + fn + fp + tn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept
    {
        tp += o.tp;
        fn += o.fn;
        fp += o.fp;
        tn += o.tn;
        return *this;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const int> pred, std::span<const int> truth)
{
    if (pred.size() != truth.size() || pred.empty()) {
        throw Error(ErrorCode::LengthMismatch, "prediction and truth lengths differ or are empty");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] == 1) {
            (pred[i] == 1 ? cm.tp : cm.fn) += 1;
        } else {
            (pred[i] == 1 ? cm.fp : cm.tn) += 1;
        }
    }
    return cm;
}

/// Ratios with a zero denominator are reported as 0 and flagged undefined.
struct MetricSet {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double specificity = 0.0;
    double auc = 0.0;
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
    bool specificity_defined = true;
    bool auc_defined = false;

    friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0; ///< scores >= threshold are called positive; +inf at the origin

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Threshold sweep over distinct scores, highest first. Equal scores form one step,
/// so a tie between a positive and a negative contributes a diagonal segment.
inline RocCurve roc_auc(std::span<const double> scores, std::span<const int> truth)
{
    if (scores.size() != truth.size()) {
        throw Error(ErrorCode::LengthMismatch, "score and truth lengths differ");
    }
    std::int64_t p = 0;
    std::int64_t n = 0;
    for (int t : truth) {
        (t == 1 ? p : n) += 1;
    }
    if (p == 0 || n == 0) {
        throw Error(ErrorCode::OneClassOnly, "ROC needs both classes");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve c;
    c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t area2 = 0; // twice the area in units of one positive by one negative
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        std::int64_t dtp = 0;
        std::int64_t dfp = 0;
        while (i < order.size() && scores[order[i]] == s) {
            (truth[order[i]] == 1 ? dtp : dfp) += 1;
            ++i;
        }
        area2 += dfp * (2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        c.points.push_back({static_cast<double>(fp) / static_cast<double>(n), static_cast<double>(tp) / static_cast<double>(p), s});
    }
    c.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(p) * static_cast<double>(n));
    return c;
}

inline MetricSet metrics(const ConfusionMatrix& cm, std::optional<double> auc = std::nullopt)
{
    MetricSet m;
    const auto ratio = [](std::size_t num, std::size_t den, bool& defined) {
        defined = den > 0;
        return defined ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };
    bool acc_defined = true;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total(), acc_defined);
    m.precision = ratio(cm.tp, cm.tp + cm.fp, m.precision_defined);
    m.recall = ratio(cm.tp, cm.tp + cm.fn, m.recall_defined);
    m.specificity = ratio(cm.tn, cm.tn + cm.fp, m.specificity_defined);
    m.f1_defined = m.precision_defined && m.recall_defined && (m.precision + m.recall) > 0.0;
    m.f1 = m.f1_defined ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    if (auc) {
        m.auc = *auc;
        m.auc_defined = true;
    }
    return m;
}

/// Metrics plus AUC from probability scores when both classes are present.
inline MetricSet metrics(std::span<const int> pred, std::span<const int> truth, std::span<const double> scores)
{
    const auto cm = confusion(pred, truth);
    std::optional<double> auc;
    if (cm.tp + cm.fn > 0 && cm.fp + cm.tn > 0) {
        auc = roc_auc(scores, truth).auc;
    }
    return metrics(cm, auc);
}

/// Field-wise mean; a flag stays set only if it is set in every input.
inline MetricSet mean_metrics(std::span<const MetricSet> ms)
{
    MetricSet out;
    if (ms.empty()) {
        return out;
    }
    const double k = static_cast<double>(ms.size());
    out.auc_defined = true;
    for (const auto& m : ms) {
        out.accuracy += m.accuracy;
        out.precision += m.precision;
        out.recall += m.recall;
        out.f1 += m.f1;
        out.specificity += m.specificity;
        out.auc += m.auc;
        out.precision_defined = out.precision_defined && m.precision_defined;
        out.recall_defined = out.recall_defined && m.recall_defined;
        out.f1_defined = out.f1_defined && m.f1_defined;
        out.specificity_defined = out.specificity_defined && m.specificity_defined;
        out.auc_defined = out.auc_defined && m.auc_defined;
    }
    out.accuracy /= k;
    out.precision /= k;
    out.recall /= k;
    out.f1 /= k;
    out.specificity /= k;
    out.auc /= k;
    return out;
}

inline nlohmann::json to_json(const ConfusionMatrix& cm)
{
    return {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

inline nlohmann::json to_json(const MetricSet& m)
{
    nlohmann::json j;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["specificity"] = m.specificity;
    j["auc"] = m.auc;
    j["undefined"] = nlohmann::json::array();
    const std::pair<const char*, bool> flags[] = {{"precision", m.precision_defined},
                                                  {"recall", m.recall_defined},
                                                  {"f1", m.f1_defined},
                                                  {"specificity", m.specificity_defined},
                                                  {"auc", m.auc_defined}};
    for (const auto& [name, defined] : flags) {
        if (!defined) {
            j["undefined"].push_back(name);
        }
    }
    return j;
}

} // namespace gliofuse::evaluation
