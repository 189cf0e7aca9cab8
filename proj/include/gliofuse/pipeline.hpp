#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fnmatch.h>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/config.hpp"
#include "gliofuse/evaluation/cross_validate.hpp"
#include "gliofuse/evaluation/stats.hpp"
#include "gliofuse/feature_table.hpp"
#include "gliofuse/hash.hpp"
#include "gliofuse/nifti.hpp"
#include "gliofuse/pca.hpp"
#include "gliofuse/radiomics/extractor.hpp"
#include "gliofuse/resample.hpp"
#include "gliofuse/roi.hpp"
#include "gliofuse/synth.hpp"
#include "gliofuse/wavelet.hpp"

namespace gliofuse {

namespace fs = std::filesystem;

using Logger = std::function<void(const std::string&)>;

inline constexpr std::array<const char*, 5> kModalityNames{"flair", "t1", "t1ce", "t2", "seg"};

/// Where one subject's volumes come from: a synthetic recipe or five NIfTI files.
struct SubjectSource {
    std::string id;
    Grade grade = Grade::LGG;
    std::optional<CohortEntry> synth;
    Dims synth_dims{128, 128, 16};
    std::array<fs::path, 5> files;
};

inline bool glob_match(const std::string& pattern, const std::string& text)
{
    return ::fnmatch(pattern.c_str(), text.c_str(), 0) == 0;
}

inline std::string expand_pattern(std::string pattern, const std::string& id, const std::string& modality)
{
    for (const auto& [key, value] : {std::pair<std::string, std::string>{"{id}", id}, {"{modality}", modality}}) {
        for (auto at = pattern.find(key); at != std::string::npos; at = pattern.find(key, at + value.size())) {
            pattern.replace(at, key.size(), value);
        }
    }
    return pattern;
}

inline CohortManifest cohort_of(const PipelineConfig& cfg)
{
    if (!cfg.data.cohort_manifest.empty()) {
        return cohort_from_json(nlohmann::json::parse(read_text(cfg.data.cohort_manifest)));
    }
    return make_cohort(cfg.data.n_hgg, cfg.data.n_lgg, cfg.data.seed, cfg.data.dims);
}

/// Subjects in a fixed order (HGG then LGG, ids sorted within a grade for NIfTI sources).
inline std::vector<SubjectSource> list_subjects(const PipelineConfig& cfg)
{
    std::vector<SubjectSource> out;
    const auto none_match = [&] { return Error(ErrorCode::MissingInput, "no subjects match '" + cfg.data.subjects + "'"); };
    if (cfg.data.source == DataSource::Synthetic) {
        const auto cohort = cohort_of(cfg);
        for (const auto& e : cohort.subjects) {
            if (glob_match(cfg.data.subjects, e.id)) {
                out.push_back({e.id, e.grade, e, cohort.dims, {}});
            }
        }
        if (out.empty()) {
            throw none_match();
        }
        return out;
    }
    std::vector<std::string> missing;
    for (const auto& [dir, grade] : {std::pair{cfg.data.hgg_dir, Grade::HGG}, std::pair{cfg.data.lgg_dir, Grade::LGG}}) {
        if (dir.empty()) {
            continue;
        }
        std::vector<std::string> ids;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_directory() && glob_match(cfg.data.subjects, entry.path().filename().string())) {
                ids.push_back(entry.path().filename().string());
            }
        }
        std::sort(ids.begin(), ids.end());
        for (const auto& id : ids) {
            SubjectSource s;
            s.id = id;
            s.grade = grade;
            for (std::size_t m = 0; m < kModalityNames.size(); ++m) {
                fs::path p = fs::path(dir) / expand_pattern(cfg.data.pattern, id, kModalityNames[m]);
                if (!fs::exists(p) && p.extension() == ".gz") {
                    p.replace_extension();
                }
                if (!fs::exists(p)) {
                    missing.push_back(p.string());
                }
                s.files[m] = p;
            }
            out.push_back(std::move(s));
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing input files:";
        for (const auto& m : missing) {
            msg += " " + m;
        }
        throw Error(ErrorCode::MissingInput, msg);
    }
    if (out.empty()) {
        throw none_match();
    }
    return out;
}

/// Loads (or synthesizes) a subject, resizes slices to the pipeline size, and min-max normalizes modalities.
inline SubjectCase load_subject(const SubjectSource& s, const PipelineConfig& cfg)
{
    SubjectCase sc;
    if (s.synth) {
        sc = synth_entry(*s.synth, s.synth_dims);
    } else {
        sc.id = s.id;
        sc.grade = s.grade;
        sc.flair = nifti::read_file(s.files[0]);
        sc.t1 = nifti::read_file(s.files[1]);
        sc.t1ce = nifti::read_file(s.files[2]);
        sc.t2 = nifti::read_file(s.files[3]);
        sc.seg = nifti::read_file(s.files[4], true);
    }
    auto prep = [&](const Volume& v) {
        const bool same = v.dims().nx == cfg.resize.nx && v.dims().ny == cfg.resize.ny;
        return normalize_volume(same ? v : resize_volume(v, cfg.resize));
    };
    sc.flair = prep(sc.flair);
    sc.t1 = prep(sc.t1);
    sc.t1ce = prep(sc.t1ce);
    sc.t2 = prep(sc.t2);
    if (!(sc.seg.dims().nx == cfg.resize.nx && sc.seg.dims().ny == cfg.resize.ny)) {
        sc.seg = resize_volume(sc.seg, cfg.resize);
    }
    sc.validate();
    return sc;
}

struct FusedSubject {
    Volume fused;
    RoiSet rois;
};

inline FusedSubject fuse_and_segment(const SubjectCase& sc, const PipelineConfig& cfg)
{
    FusedSubject f{fuse_subject(sc, cfg.wavelet), {}};
    f.rois = derive_rois(sc.seg, sc.flair, cfg.roi);
    return f;
}

/// Runs `f(i)` for i in [0, n) on at most `workers` threads. Results must be written by index.
template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& f)
{
    if (workers == 0) {
        workers = std::max(1U, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            f(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

struct SkippedSubject {
    std::string id;
    std::string reason;
};

struct ExtractResult {
    FeatureTable table;
    std::vector<SkippedSubject> skipped;
    bool cached = false;
};

namespace detail {

inline void write_text(const fs::path& p, const std::string& text)
{
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + p.string());
    }
    out << text;
}

inline void write_json(const fs::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

inline fs::path cache_key_path(const fs::path& out, const std::string& stage) { return out / ".cache" / (stage + ".key"); }

inline bool cache_hit(const fs::path& out, const std::string& stage, const std::string& key, const std::vector<fs::path>& outputs)
{
    const auto kp = cache_key_path(out, stage);
    if (!fs::exists(kp) || read_text(kp) != key) {
        return false;
    }
    return std::all_of(outputs.begin(), outputs.end(), [](const fs::path& p) { return fs::exists(p); });
}

inline void store_key(const fs::path& out, const std::string& stage, const std::string& key)
{
    write_text(cache_key_path(out, stage), key);
}

inline std::string extraction_key(const PipelineConfig& cfg, const std::vector<SubjectSource>& subjects)
{
    auto j = to_json(cfg);
    nlohmann::json k;
    k["version"] = kVersion;
    k["feature_manifest"] = radiomics::kManifestVersion;
    for (const char* key : {"resize", "wavelet", "discretization", "gldm_alpha", "roi"}) {
        k[key] = j[key];
    }
    nlohmann::json subs = nlohmann::json::array();
    for (const auto& s : subjects) {
        nlohmann::json e{{"id", s.id}, {"grade", to_string(s.grade)}};
        if (s.synth) {
            e["seed"] = s.synth->seed;
            e["dims"] = {s.synth_dims.nx, s.synth_dims.ny, s.synth_dims.nz};
        } else {
            for (std::size_t m = 0; m < s.files.size(); ++m) {
                e[kModalityNames[m]] = hash_file(s.files[m]);
            }
        }
        subs.push_back(std::move(e));
    }
    k["subjects"] = subs;
    return hash_hex(k.dump());
}

} // namespace detail

/// Fuse, segment and extract every subject. Subjects with an empty ROI are skipped; any other
/// failure aborts the stage with every failing subject named.
inline ExtractResult stage_extract(const PipelineConfig& cfg, const Logger& log = {})
{
    const fs::path out = cfg.output;
    const auto subjects = list_subjects(cfg);
    const auto key = detail::extraction_key(cfg, subjects);
    const fs::path table_path = out / "features.csv";
    const fs::path skipped_path = out / "skipped.json";
    ExtractResult res;
    if (detail::cache_hit(out, "extract", key, {table_path, skipped_path})) {
        res.table = read_feature_table(table_path);
        for (const auto& s : nlohmann::json::parse(read_text(skipped_path))) {
            res.skipped.push_back({s.at("id").get<std::string>(), s.at("reason").get<std::string>()});
        }
        res.cached = true;
        if (log) {
            log("extract: cached (" + std::to_string(res.table.rows.size()) + " subjects)");
        }
        return res;
    }

    struct Outcome {
        std::optional<FeatureRow> row;
        std::string skipped;
        std::string error;
        ErrorCode code = ErrorCode::IoError;
    };
    std::vector<Outcome> outcomes(subjects.size());
    parallel_for(subjects.size(), cfg.workers, [&](std::size_t i) {
        const auto& s = subjects[i];
        try {
            const auto sc = load_subject(s, cfg);
            const auto f = fuse_and_segment(sc, cfg);
            auto fv = radiomics::extract_feature_vector(f.fused, f.rois, cfg.extraction);
            outcomes[i].row = FeatureRow{s.id, s.grade, std::move(fv.values)};
        } catch (const EmptyRoiError& e) {
            outcomes[i].skipped = e.what();
        } catch (const Error& e) {
            outcomes[i].error = e.what();
            outcomes[i].code = e.code();
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });

    std::string errors;
    ErrorCode first_code = ErrorCode::IoError;
    res.table.column_names = radiomics::feature_names();
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        auto& o = outcomes[i];
        if (!o.error.empty()) {
            if (errors.empty()) {
                first_code = o.code;
            }
            errors += (errors.empty() ? "" : "; ") + subjects[i].id + ": " + o.error;
        } else if (!o.skipped.empty()) {
            res.skipped.push_back({subjects[i].id, o.skipped});
            if (log) {
                log("extract: skipped " + subjects[i].id + " (" + o.skipped + ")");
            }
        } else {
            res.table.rows.push_back(std::move(*o.row));
        }
    }
    if (!errors.empty()) {
        throw Error(first_code, "extraction failed: " + errors);
    }
    write_feature_table(res.table, table_path);
    nlohmann::json sk = nlohmann::json::array();
    for (const auto& s : res.skipped) {
        sk.push_back({{"id", s.id}, {"reason", s.reason}});
    }
    detail::write_json(skipped_path, sk);
    detail::store_key(out, "extract", key);
    if (log) {
        log("extract: " + std::to_string(res.table.rows.size()) + " subjects, " + std::to_string(res.skipped.size()) + " skipped");
    }
    return res;
}

struct PcaStageResult {
    pca::PcaModel pooled;
    std::size_t selected = 0;
    std::map<std::string, pca::PcaModel> per_grade;
    bool cached = false;
};

/// Pooled PCA (scree, loadings, model JSON) plus optional per-grade fits for the loading report.
inline PcaStageResult stage_pca(const PipelineConfig& cfg, const FeatureTable& table, const Logger& log = {})
{
    const fs::path out = cfg.output;
    PcaStageResult res;
    res.pooled = pca::fit_pca(table, cfg.reduction.standardize);
    res.selected = pca::select_components(res.pooled, cfg.reduction.variance_threshold);
    if (cfg.per_grade_loadings) {
        for (Grade g : {Grade::HGG, Grade::LGG}) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                if (table.rows[i].grade == g) {
                    idx.push_back(i);
                }
            }
            if (idx.size() >= 2) {
                res.per_grade[std::string(to_string(g))] = pca::fit_pca(table.select_rows(idx), cfg.reduction.standardize);
            }
        }
    }

    std::string scree = "scope,component,ratio,cumulative\n";
    std::string loadings = "scope,component,rank,feature,loading\n";
    auto emit = [&](const std::string& scope, const pca::PcaModel& m) {
        for (const auto& r : pca::scree_report(m)) {
            scree += scope + "," + std::to_string(r.component) + "," + format_double(r.ratio) + "," + format_double(r.cumulative) + "\n";
        }
        for (std::size_t c = 1; c <= std::min<std::size_t>(2, m.dimension()); ++c) {
            std::size_t rank = 1;
            for (const auto& [name, w] : pca::top_loadings(m, c, cfg.top_loadings)) {
                loadings += scope + "," + std::to_string(c) + "," + std::to_string(rank++) + "," + name + "," + format_double(w) + "\n";
            }
        }
    };
    emit("pooled", res.pooled);
    for (const auto& [scope, m] : res.per_grade) {
        emit(scope, m);
    }
    detail::write_text(out / "scree.csv", scree);
    detail::write_text(out / "loadings.csv", loadings);
    auto mj = pca::to_json(res.pooled);
    mj["selected_components"] = res.selected;
    mj["variance_threshold"] = cfg.reduction.variance_threshold;
    detail::write_json(out / "pca_model.json", mj);
    if (log) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "pca: %zu components reach %.2f of the variance", res.selected,
                      cfg.reduction.variance_threshold);
        log(buf);
    }
    return res;
}

/// Energy-ROI2 box-plot summaries per grade and its point-biserial correlation with grade.
inline void attach_statistics(evaluation::EvalReport& rep, const FeatureTable& table, const std::string& column = "firstorder_Energy_ROI2")
{
    std::size_t c = 0;
    try {
        c = table.column(column);
    } catch (const Error&) {
        return;
    }
    std::vector<double> all;
    std::vector<double> grade;
    std::map<std::string, std::vector<double>> by_grade;
    for (const auto& r : table.rows) {
        all.push_back(r.values[c]);
        grade.push_back(r.grade == Grade::HGG ? 1.0 : 0.0);
        by_grade[std::string(to_string(r.grade))].push_back(r.values[c]);
    }
    for (const auto& [g, v] : by_grade) {
        if (v.size() >= 2) {
            rep.descriptive[column + "_" + g] = evaluation::descriptive_stats(v);
        }
    }
    try {
        rep.statistics["pearson_r_" + column + "_vs_grade"] = evaluation::pearson_r(all, grade);
    } catch (const Error&) {
    }
}

struct EvaluateResult {
    evaluation::EvalReport report;
    bool reused_models = false;
};

namespace detail {

inline fs::path fold_model_path(const fs::path& out, std::string_view clf, std::size_t f)
{
    return out / "models" / ("fold" + std::to_string(f) + "_" + std::string(clf) + ".json");
}

inline fs::path full_model_path(const fs::path& out, std::string_view clf)
{
    return out / "models" / ("full_" + std::string(clf) + ".json");
}

inline std::string evaluation_key(const PipelineConfig& cfg, const FeatureTable& table, classifiers::ClassifierKind kind)
{
    auto j = to_json(cfg);
    nlohmann::json k;
    k["version"] = kVersion;
    k["pca"] = j["pca"];
    k["classifier"] = j["classifiers"][std::string(classifiers::to_string(kind))];
    k["cv"] = j["cv"];
    Fnv1a h;
    std::ostringstream rows;
    for (const auto& r : table.rows) {
        rows << r.subject_id << ',' << to_string(r.grade);
        for (double v : r.values) {
            rows << ',' << format_double(v);
        }
        rows << '\n';
    }
    h.update(rows.str());
    k["table"] = h.hex();
    return hash_hex(k.dump());
}

} // namespace detail

/// Fits a model on every row and saves it; returns its training-set metrics.
inline evaluation::MetricSet stage_train(const PipelineConfig& cfg, const FeatureTable& table, classifiers::ClassifierKind kind)
{
    const auto x = table.matrix();
    const auto y = table.labels();
    std::vector<std::size_t> all(table.rows.size());
    std::iota(all.begin(), all.end(), 0);
    const auto fm = evaluation::fit_fold(x, y, all, table.column_names, cfg.reduction, cfg.classifier_config(kind));
    detail::write_json(detail::full_model_path(cfg.output, classifiers::to_string(kind)), evaluation::to_json(fm));
    return evaluation::evaluate_rows(fm, x, y, all).metrics;
}

/// Cross-validates one classifier. With `reuse`, saved folds and fold models are used when present
/// instead of refitting.
inline EvaluateResult stage_evaluate(const PipelineConfig& cfg, const FeatureTable& table, classifiers::ClassifierKind kind,
                                     bool reuse, const Logger& log = {})
{
    const fs::path out = cfg.output;
    const std::string name(classifiers::to_string(kind));
    const auto x = table.matrix();
    const auto y = table.labels();
    EvaluateResult res;

    std::vector<fs::path> model_files{out / "folds.json", detail::full_model_path(out, name)};
    for (std::size_t f = 0; f < cfg.k; ++f) {
        model_files.push_back(detail::fold_model_path(out, name, f));
    }
    const auto key = detail::evaluation_key(cfg, table, kind);
    const bool have_models = std::all_of(model_files.begin(), model_files.end(), [](const fs::path& p) { return fs::exists(p); });
    const bool key_ok = detail::cache_hit(out, "evaluate_" + name, key, model_files);

    if (have_models && (reuse || key_ok)) {
        const auto folds = evaluation::folds_from_json(nlohmann::json::parse(read_text(out / "folds.json")));
        if (folds.n_rows != table.rows.size()) {
            throw Error(ErrorCode::SchemaMismatch, "saved folds do not match the feature table row count");
        }
        std::vector<evaluation::FoldResult> results;
        for (std::size_t f = 0; f < folds.k(); ++f) {
            const auto fm = evaluation::fold_model_from_json(nlohmann::json::parse(read_text(detail::fold_model_path(out, name, f))));
            auto r = evaluation::evaluate_rows(fm, x, y, folds.test[f]);
            r.fold = f;
            r.n_train = folds.n_rows - folds.test[f].size();
            results.push_back(std::move(r));
        }
        res.report = evaluation::assemble_report(name, cfg.cv_seed, std::move(results));
        const auto full = evaluation::fold_model_from_json(nlohmann::json::parse(read_text(detail::full_model_path(out, name))));
        std::vector<std::size_t> all(table.rows.size());
        std::iota(all.begin(), all.end(), 0);
        res.report.training = evaluation::evaluate_rows(full, x, y, all).metrics;
        res.reused_models = true;
    } else {
        const auto folds = evaluation::stratified_kfold(y, cfg.k, cfg.cv_seed);
        detail::write_json(out / "folds.json", evaluation::to_json(folds));
        auto cv = evaluation::cross_validate(x, y, table.column_names, cfg.reduction, cfg.classifier_config(kind), folds, cfg.cv_seed);
        for (std::size_t f = 0; f < cv.models.size(); ++f) {
            detail::write_json(detail::fold_model_path(out, name, f), evaluation::to_json(cv.models[f]));
        }
        res.report = std::move(cv.report);
        res.report.training = stage_train(cfg, table, kind);
        detail::store_key(out, "evaluate_" + name, key);
    }
    attach_statistics(res.report, table);
    detail::write_json(out / ("report_" + name + ".json"), evaluation::to_json(res.report));
    evaluation::write_roc_csv(res.report, out / ("roc_" + name + ".csv"));
    evaluation::write_fold_metrics_csv(res.report, out / ("metrics_" + name + ".csv"));
    if (log) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "evaluate %s%s: cv accuracy %.4f, auc %.4f", name.c_str(),
                      res.reused_models ? " (saved models)" : "", res.report.mean.accuracy, res.report.mean.auc);
        log(buf);
    }
    return res;
}

/// Writes the fused volume and ROI masks of every subject.
inline std::size_t stage_fuse(const PipelineConfig& cfg, const Logger& log = {})
{
    const auto subjects = list_subjects(cfg);
    const fs::path dir = fs::path(cfg.output) / "fused";
    std::vector<std::string> notes(subjects.size());
    parallel_for(subjects.size(), cfg.workers, [&](std::size_t i) {
        const auto sc = load_subject(subjects[i], cfg);
        const auto fused = fuse_subject(sc, cfg.wavelet);
        nifti::write_file(dir / (sc.id + "_fused.nii.gz"), fused);
        try {
            const auto rois = derive_rois(sc.seg, sc.flair, cfg.roi);
            for (int k = 1; k <= 3; ++k) {
                write_mask(dir / (sc.id + "_roi" + std::to_string(k) + ".nii.gz"), rois.get(k), fused.spacing());
            }
        } catch (const EmptyRoiError& e) {
            notes[i] = sc.id + ": " + e.what();
        }
    });
    if (log) {
        for (const auto& n : notes) {
            if (!n.empty()) {
                log("fuse: no masks for " + n);
            }
        }
        log("fuse: wrote " + std::to_string(subjects.size()) + " fused volumes to " + dir.string());
    }
    return subjects.size();
}

/// Writes the synthetic cohort as BraTS-style NIfTI folders plus its cohort manifest.
inline CohortManifest stage_synth(const PipelineConfig& cfg, const Logger& log = {})
{
    auto cohort = cohort_of(cfg);
    std::erase_if(cohort.subjects, [&](const CohortEntry& e) { return !glob_match(cfg.data.subjects, e.id); });
    const fs::path dir = fs::path(cfg.output) / "cohort";
    parallel_for(cohort.subjects.size(), cfg.workers, [&](std::size_t i) {
        const auto& e = cohort.subjects[i];
        const auto sc = synth_entry(e, cohort.dims);
        const fs::path sub = dir / std::string(to_string(e.grade)) / e.id;
        const std::array<const Volume*, 5> vols{&sc.flair, &sc.t1, &sc.t1ce, &sc.t2, &sc.seg};
        for (std::size_t m = 0; m < vols.size(); ++m) {
            nifti::WriteOptions opt;
            opt.datatype = m == 4 ? nifti::Datatype::UInt8 : nifti::Datatype::Float32;
            nifti::write_file(sub / (e.id + "_" + kModalityNames[m] + ".nii.gz"), *vols[m], opt);
        }
    });
    detail::write_json(dir / "cohort.json", to_json(cohort));
    if (log) {
        log("synth: wrote " + std::to_string(cohort.subjects.size()) + " subjects to " + dir.string());
    }
    return cohort;
}

struct ReportBundle {
    fs::path output;
    FeatureTable features;
    std::vector<SkippedSubject> skipped;
    PcaStageResult pca;
    std::map<std::string, evaluation::EvalReport> reports;
    nlohmann::json manifest;
    bool extraction_cached = false;
};

inline nlohmann::json run_manifest(const PipelineConfig& cfg, const ReportBundle& b)
{
    nlohmann::json m;
    m["tool"] = "gliofuse";
    m["version"] = kVersion;
    m["feature_manifest"] = radiomics::kManifestVersion;
    m["config_hash"] = config_hash(cfg);
    m["config"] = to_json(cfg);
    // Output location and thread count do not affect results; leaving them out keeps manifests comparable.
    m["config"].erase("output");
    m["config"].erase("workers");
    m["seeds"] = {{"cv", cfg.cv_seed}, {"synthetic", cfg.data.seed}, {"rf", cfg.rf.seed}};
    m["subjects"] = b.features.rows.size();
    nlohmann::json sk = nlohmann::json::array();
    for (const auto& s : b.skipped) {
        sk.push_back({{"id", s.id}, {"reason", s.reason}});
    }
    m["skipped"] = sk;
    nlohmann::json outputs = nlohmann::json::object();
    std::vector<std::string> names{"features.csv", "scree.csv", "loadings.csv", "pca_model.json"};
    for (auto k : cfg.classifiers) {
        const std::string n(classifiers::to_string(k));
        names.push_back("report_" + n + ".json");
        names.push_back("roc_" + n + ".csv");
        names.push_back("metrics_" + n + ".csv");
    }
    for (const auto& n : names) {
        if (fs::exists(b.output / n)) {
            outputs[n] = hash_file(b.output / n);
        }
    }
    m["outputs"] = outputs;
    return m;
}

/// ingest -> fuse -> ROI -> extract -> persist -> PCA -> K-fold CV for each classifier -> reports.
inline ReportBundle run_pipeline(const PipelineConfig& cfg, const Logger& log = {})
{
    if (cfg.k < 2) {
        throw Error(ErrorCode::InvalidConfig, "cv.k must be at least 2");
    }
    ReportBundle b;
    b.output = cfg.output;
    fs::create_directories(b.output);
    auto ex = stage_extract(cfg, log);
    b.features = std::move(ex.table);
    b.skipped = std::move(ex.skipped);
    b.extraction_cached = ex.cached;
    if (b.features.rows.size() < 2) {
        throw Error(ErrorCode::TooFewRows, "fewer than 2 subjects remain after extraction");
    }
    radiomics::write_manifest(b.output / "feature_manifest.txt");
    b.pca = stage_pca(cfg, b.features, log);
    for (auto k : cfg.classifiers) {
        b.reports[std::string(classifiers::to_string(k))] = stage_evaluate(cfg, b.features, k, false, log).report;
    }
    b.manifest = run_manifest(cfg, b);
    detail::write_json(b.output / "manifest.json", b.manifest);
    return b;
}

} // namespace gliofuse
