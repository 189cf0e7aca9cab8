#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/classifiers/classifier.hpp"
#include "gliofuse/error.hpp"
#include "gliofuse/feature_table.hpp"
#include "gliofuse/evaluation/folds.hpp"
#include "gliofuse/evaluation/metrics.hpp"
#include "gliofuse/evaluation/stats.hpp"
#include "gliofuse/pca.hpp"

namespace gliofuse::evaluation {

/// What the classifier sees: PC scores, a single named feature, or every column unchanged.
enum class FeatureMode { Pca, EnergyRoi2, Raw };

inline std::string_view to_string(FeatureMode m) noexcept
{
    switch (m) {
    case FeatureMode::Pca: return "pca";
    case FeatureMode::EnergyRoi2: return "energy_roi2";
    case FeatureMode::Raw: return "raw";
    }
    return "?";
}

inline FeatureMode parse_feature_mode(std::string_view s)
{
    if (s == "pca") {
        return FeatureMode::Pca;
    }
    if (s == "energy_roi2") {
        return FeatureMode::EnergyRoi2;
    }
    if (s == "raw") {
        return FeatureMode::Raw;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown feature_mode '" + std::string(s) + "'");
}

struct ReductionConfig {
    FeatureMode mode = FeatureMode::Pca;
    bool standardize = true;
    double variance_threshold = 0.85;
    std::string energy_column = "firstorder_Energy_ROI2";
};

/// Everything fitted on one fold's training rows.
struct FoldModel {
    FeatureMode mode = FeatureMode::Pca;
    std::optional<pca::PcaModel> pca;
    std::size_t n_components = 0;
    std::vector<std::size_t> columns;
    classifiers::Model classifier;

    [[nodiscard]] Matrix project(const Matrix& x) const
    {
        if (mode == FeatureMode::Pca) {
            return pca::transform(*pca, x, n_components);
        }
        Matrix out(x.rows(), columns.size());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < columns.size(); ++c) {
                out(r, c) = x(r, columns[c]);
            }
        }
        return out;
    }
};

inline Matrix take_rows(const Matrix& x, std::span<const std::size_t> rows)
{
    Matrix out(rows.size(), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = x.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

/// Fits the reduction and the classifier using only `train_rows`.
inline FoldModel fit_fold(const Matrix& x, std::span<const int> y, std::span<const std::size_t> train_rows,
                          const std::vector<std::string>& names, const ReductionConfig& red,
                          const classifiers::ClassifierConfig& clf)
{
    FoldModel fm;
    fm.mode = red.mode;
    const Matrix xt = take_rows(x, train_rows);
    switch (red.mode) {
    case FeatureMode::Pca:
        fm.pca = pca::fit_pca(xt, names, red.standardize);
        fm.n_components = pca::select_components(*fm.pca, red.variance_threshold);
        break;
    case FeatureMode::EnergyRoi2: {
        std::size_t c = names.size();
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == red.energy_column) {
                c = i;
            }
        }
        if (c == names.size()) {
            throw Error(ErrorCode::SchemaMismatch, "feature table has no column " + red.energy_column);
        }
        fm.columns = {c};
        break;
    }
    case FeatureMode::Raw:
        for (std::size_t i = 0; i < x.cols(); ++i) {
            fm.columns.push_back(i);
        }
        break;
    }
    classifiers::TrainSet ts;
    ts.x = fm.project(xt);
    for (auto r : train_rows) {
        ts.y.push_back(y[r]);
    }
    fm.classifier = classifiers::train(clf, ts);
    return fm;
}

inline nlohmann::json to_json(const FoldModel& fm)
{
    nlohmann::json j;
    j["feature_mode"] = to_string(fm.mode);
    j["n_components"] = fm.n_components;
    j["columns"] = fm.columns;
    j["pca"] = fm.pca ? pca::to_json(*fm.pca) : nlohmann::json(nullptr);
    j["classifier"] = classifiers::model_to_json(fm.classifier);
    return j;
}

inline FoldModel fold_model_from_json(const nlohmann::json& j)
{
    FoldModel fm;
    fm.mode = parse_feature_mode(j.at("feature_mode").get<std::string>());
    fm.n_components = j.at("n_components").get<std::size_t>();
    fm.columns = j.at("columns").get<std::vector<std::size_t>>();
    if (!j.at("pca").is_null()) {
        fm.pca = pca::pca_from_json(j.at("pca"));
    }
    fm.classifier = classifiers::model_from_json(j.at("classifier"));
    return fm;
}

struct FoldResult {
    std::size_t fold = 0;
    std::size_t n_train = 0;
    std::vector<std::size_t> test_indices;
    std::vector<double> proba;
    std::vector<int> pred;
    std::vector<int> truth;
    ConfusionMatrix cm;
    MetricSet metrics;
    std::optional<RocCurve> roc;
};

inline FoldResult evaluate_rows(const FoldModel& fm, const Matrix& x, std::span<const int> y,
                                std::span<const std::size_t> rows)
{
    FoldResult r;
    r.test_indices.assign(rows.begin(), rows.end());
    const Matrix z = fm.project(take_rows(x, rows));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double p = classifiers::predict_proba(fm.classifier, z.row(i));
        r.proba.push_back(p);
        r.pred.push_back(classifiers::label_from_proba(p));
        r.truth.push_back(y[rows[i]]);
    }
    r.cm = confusion(r.pred, r.truth);
    std::optional<double> auc;
    if (r.cm.tp + r.cm.fn > 0 && r.cm.fp + r.cm.tn > 0) {
        r.roc = roc_auc(r.proba, r.truth);
        auc = r.roc->auc;
    }
    r.metrics = metrics(r.cm, auc);
    return r;
}

/// Per-fold results, their mean, and the pooled view over all held-out predictions.
struct EvalReport {
    std::string classifier;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<FoldResult> folds;
    MetricSet mean;
    ConfusionMatrix pooled_cm;
    MetricSet pooled;
    std::optional<RocCurve> pooled_roc;
    std::optional<MetricSet> training;
    std::map<std::string, DescriptiveStats> descriptive;
    std::map<std::string, double> statistics;
};

inline EvalReport assemble_report(std::string classifier, std::uint64_t seed, std::vector<FoldResult> folds)
{
    EvalReport rep;
    rep.classifier = std::move(classifier);
    rep.k = folds.size();
    rep.seed = seed;
    rep.folds = std::move(folds);
    std::vector<MetricSet> ms;
    std::vector<double> scores;
    std::vector<int> truth;
    for (const auto& f : rep.folds) {
        ms.push_back(f.metrics);
        rep.pooled_cm += f.cm;
        scores.insert(scores.end(), f.proba.begin(), f.proba.end());
        truth.insert(truth.end(), f.truth.begin(), f.truth.end());
    }
    rep.mean = mean_metrics(ms);
    std::optional<double> auc;
    if (rep.pooled_cm.tp + rep.pooled_cm.fn > 0 && rep.pooled_cm.fp + rep.pooled_cm.tn > 0) {
        rep.pooled_roc = roc_auc(scores, truth);
        auc = rep.pooled_roc->auc;
    }
    rep.pooled = metrics(rep.pooled_cm, auc);
    return rep;
}

struct CvResult {
    EvalReport report;
    std::vector<FoldModel> models;
};

/// K-fold evaluation. Reduction and classifier are refitted inside every fold on its training rows only.
inline CvResult cross_validate(const Matrix& x, std::span<const int> y, const std::vector<std::string>& names,
                               const ReductionConfig& red, const classifiers::ClassifierConfig& clf, const Folds& folds,
                               std::uint64_t seed = 0)
{
    if (folds.n_rows != x.rows() || y.size() != x.rows()) {
        throw Error(ErrorCode::LengthMismatch, "folds, labels and rows disagree in size");
    }
    CvResult out;
    std::vector<FoldResult> results;
    for (std::size_t f = 0; f < folds.k(); ++f) {
        const auto train = folds.train(f);
        auto fm = fit_fold(x, y, train, names, red, clf);
        auto r = evaluate_rows(fm, x, y, folds.test[f]);
        r.fold = f;
        r.n_train = train.size();
        results.push_back(std::move(r));
        out.models.push_back(std::move(fm));
    }
    out.report = assemble_report(std::string(classifiers::to_string(classifiers::kind_of(clf))), seed, std::move(results));
    return out;
}

inline CvResult cross_validate(const FeatureTable& t, const ReductionConfig& red, const classifiers::ClassifierConfig& clf,
                               std::size_t k, std::uint64_t seed)
{
    const auto y = t.labels();
    const auto folds = stratified_kfold(y, k, seed);
    return cross_validate(t.matrix(), y, t.column_names, red, clf, folds, seed);
}

inline nlohmann::json roc_to_json(const RocCurve& c)
{
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points) {
        pts.push_back({p.fpr, p.tpr});
    }
    return {{"auc", c.auc}, {"points", pts}};
}

inline nlohmann::json to_json(const EvalReport& r)
{
    nlohmann::json j;
    j["classifier"] = r.classifier;
    j["k"] = r.k;
    j["seed"] = r.seed;
    j["cv_mean"] = to_json(r.mean);
    j["cv_pooled"] = to_json(r.pooled);
    j["cv_pooled"]["confusion"] = to_json(r.pooled_cm);
    j["training"] = r.training ? to_json(*r.training) : nlohmann::json(nullptr);
    j["folds"] = nlohmann::json::array();
    for (const auto& f : r.folds) {
        nlohmann::json fj;
        fj["fold"] = f.fold;
        fj["n_train"] = f.n_train;
        fj["n_test"] = f.test_indices.size();
        fj["confusion"] = to_json(f.cm);
        fj["metrics"] = to_json(f.metrics);
        fj["test_indices"] = f.test_indices;
        fj["proba"] = f.proba;
        fj["roc"] = f.roc ? roc_to_json(*f.roc) : nlohmann::json(nullptr);
        j["folds"].push_back(std::move(fj));
    }
    j["pooled_roc"] = r.pooled_roc ? roc_to_json(*r.pooled_roc) : nlohmann::json(nullptr);
    j["descriptive"] = nlohmann::json::object();
    for (const auto& [name, s] : r.descriptive) {
        j["descriptive"][name] = to_json(s);
    }
    j["statistics"] = r.statistics;
    return j;
}

/// Rows of (curve, fpr, tpr, threshold); curve is "pooled" or "fold<i>".
inline void write_roc_csv(const EvalReport& r, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << "curve,fpr,tpr,threshold\n";
    auto emit = [&](const std::string& name, const RocCurve& c) {
        for (const auto& p : c.points) {
            out << name << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << ',' << format_double(p.threshold) << '\n';
        }
    };
    if (r.pooled_roc) {
        emit("pooled", *r.pooled_roc);
    }
    for (const auto& f : r.folds) {
        if (f.roc) {
            emit("fold" + std::to_string(f.fold), *f.roc);
        }
    }
}

/// Rows of per-fold metrics followed by the mean and pooled rows.
inline void write_fold_metrics_csv(const EvalReport& r, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << "fold,tp,fn,fp,tn,accuracy,precision,recall,f1,specificity,auc\n";
    auto row = [&](const std::string& name, const ConfusionMatrix* cm, const MetricSet& m) {
        out << name << ',';
        if (cm) {
            out << cm->tp << ',' << cm->fn << ',' << cm->fp << ',' << cm->tn;
        } else {
            out << ",,,";
        }
        for (double v : {m.accuracy, m.precision, m.recall, m.f1, m.specificity, m.auc}) {
            out << ',' << format_double(v);
        }
        out << '\n';
    };
    for (const auto& f : r.folds) {
        row(std::to_string(f.fold), &f.cm, f.metrics);
    }
    row("mean", nullptr, r.mean);
    row("pooled", &r.pooled_cm, r.pooled);
}

} // namespace gliofuse::evaluation
