#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/classifiers/classifier.hpp"
#include "gliofuse/error.hpp"
#include "gliofuse/evaluation/cross_validate.hpp"
#include "gliofuse/hash.hpp"
#include "gliofuse/radiomics/extractor.hpp"
#include "gliofuse/resample.hpp"
#include "gliofuse/roi.hpp"
#include "gliofuse/wavelet.hpp"

namespace gliofuse {

inline constexpr std::string_view kVersion = "0.1.0";

enum class DataSource { Synthetic, Nifti };

struct DataConfig {
    DataSource source = DataSource::Synthetic;
    std::size_t n_hgg = 30;
    std::size_t n_lgg = 10;
    std::uint64_t seed = 0;
    Dims dims{128, 128, 16};
    std::string cohort_manifest; ///< optional cohort JSON written by `synth`
    std::string hgg_dir;
    std::string lgg_dir;
    std::string pattern = "{id}/{id}_{modality}.nii.gz";
    std::string subjects = "*"; ///< glob over subject ids
};

struct PipelineConfig {
    DataConfig data;
    SliceSize resize{128, 128};
    WaveletConfig wavelet;
    radiomics::ExtractionConfig extraction;
    RoiLabelMap roi;
    evaluation::ReductionConfig reduction;
    bool per_grade_loadings = true;
    std::size_t top_loadings = 10;
    std::vector<classifiers::ClassifierKind> classifiers{classifiers::ClassifierKind::Gbt, classifiers::ClassifierKind::Svc,
                                                         classifiers::ClassifierKind::Rf};
    classifiers::GbtConfig gbt;
    classifiers::SvcConfig svc;
    classifiers::RfConfig rf;
    std::size_t k = 5;
    std::uint64_t cv_seed = 0;
    std::string output = "gliofuse_out";
    std::size_t workers = 0; ///< 0 selects the hardware concurrency

    [[nodiscard]] classifiers::ClassifierConfig classifier_config(classifiers::ClassifierKind kind) const
    {
        switch (kind) {
        case classifiers::ClassifierKind::Gbt: return gbt;
        case classifiers::ClassifierKind::Svc: return svc;
        case classifiers::ClassifierKind::Rf: return rf;
        }
        return gbt;
    }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Schema checks over a parsed document. Errors name the line where the offending key appears.
class ConfigReader {
public:
    ConfigReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const
    {
        std::string dotted;
        for (const auto& p : path) {
            dotted += (dotted.empty() ? "" : ".") + p;
        }
        throw Error(ErrorCode::InvalidConfig,
                    source_ + ":" + std::to_string(locate(path)) + ": " + (dotted.empty() ? "" : dotted + ": ") + msg);
    }

    void require_object(const nlohmann::json& j, const std::vector<std::string>& path,
                        std::initializer_list<std::string_view> allowed) const
    {
        if (!j.is_object()) {
            fail(path, "expected an object");
        }
        for (const auto& [key, value] : j.items()) {
            bool ok = false;
            for (auto a : allowed) {
                ok = ok || a == key;
            }
            if (!ok) {
                auto p = path;
                p.push_back(key);
                fail(p, "unknown key");
            }
        }
    }

    template <typename T>
    void read(const nlohmann::json& obj, const std::vector<std::string>& path, const std::string& key, T& out) const
    {
        if (!obj.contains(key)) {
            return;
        }
        auto p = path;
        p.push_back(key);
        const auto& v = obj.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                fail(p, "expected a boolean");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
                fail(p, std::is_unsigned_v<T> ? "expected a non-negative integer" : "expected an integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                fail(p, "expected a number");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                fail(p, "expected a string");
            }
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
            if (!v.is_array()) {
                fail(p, "expected an array of integers");
            }
            for (const auto& e : v) {
                if (!e.is_number_integer()) {
                    fail(p, "expected an array of integers");
                }
            }
        }
        out = v.get<T>();
    }

private:
    /// Line of the last path component, found by walking quoted keys in order. Falls back to line 1.
    [[nodiscard]] std::size_t locate(const std::vector<std::string>& path) const
    {
        std::size_t pos = 0;
        std::size_t found = std::string_view::npos;
        for (const auto& key : path) {
            const auto at = text_.find("\"" + key + "\"", pos);
            if (at == std::string_view::npos) {
                break;
            }
            found = at;
            pos = at + key.size() + 2;
        }
        return found == std::string_view::npos ? 1 : line_col(text_, found).first;
    }

    std::string_view text_;
    std::string source_;
};

} // namespace detail

/// Parses and validates a config document. `source` labels error messages.
inline PipelineConfig parse_config(std::string_view text, const std::string& source = "<config>")
{
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw Error(ErrorCode::InvalidConfig,
                    source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error: " + e.what());
    }
    const detail::ConfigReader rd(text, source);
    PipelineConfig c;
    rd.require_object(root, {},
                      {"data", "resize", "wavelet", "discretization", "roi", "gldm_alpha", "pca", "classifiers", "cv",
                       "output", "workers"});

    if (root.contains("data")) {
        const auto& d = root.at("data");
        const std::vector<std::string> p{"data"};
        rd.require_object(d, p,
                          {"source", "n_hgg", "n_lgg", "seed", "dims", "cohort_manifest", "hgg_dir", "lgg_dir", "pattern",
                           "subjects"});
        std::string src = "synthetic";
        rd.read(d, p, "source", src);
        if (src == "synthetic") {
            c.data.source = DataSource::Synthetic;
        } else if (src == "nifti") {
            c.data.source = DataSource::Nifti;
        } else {
            rd.fail({"data", "source"}, "must be \"synthetic\" or \"nifti\"");
        }
        rd.read(d, p, "n_hgg", c.data.n_hgg);
        rd.read(d, p, "n_lgg", c.data.n_lgg);
        rd.read(d, p, "seed", c.data.seed);
        rd.read(d, p, "cohort_manifest", c.data.cohort_manifest);
        rd.read(d, p, "hgg_dir", c.data.hgg_dir);
        rd.read(d, p, "lgg_dir", c.data.lgg_dir);
        rd.read(d, p, "pattern", c.data.pattern);
        rd.read(d, p, "subjects", c.data.subjects);
        if (d.contains("dims")) {
            std::vector<int> dims;
            rd.read(d, p, "dims", dims);
            if (dims.size() != 3 || dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
                rd.fail({"data", "dims"}, "expected three positive integers");
            }
            c.data.dims = {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                           static_cast<std::size_t>(dims[2])};
        }
        if (c.data.source == DataSource::Nifti) {
            if (c.data.hgg_dir.empty() && c.data.lgg_dir.empty()) {
                rd.fail({"data", "source"}, "nifti source needs hgg_dir and/or lgg_dir");
            }
            for (const auto* key : {"hgg_dir", "lgg_dir"}) {
                const auto& dir = std::string(key) == "hgg_dir" ? c.data.hgg_dir : c.data.lgg_dir;
                if (!dir.empty() && !std::filesystem::is_directory(dir)) {
                    rd.fail({"data", key}, "directory '" + dir + "' does not exist");
                }
            }
            if (c.data.pattern.find("{id}") == std::string::npos || c.data.pattern.find("{modality}") == std::string::npos) {
                rd.fail({"data", "pattern"}, "pattern must contain {id} and {modality}");
            }
        } else if (!c.data.cohort_manifest.empty() && !std::filesystem::exists(c.data.cohort_manifest)) {
            rd.fail({"data", "cohort_manifest"}, "file '" + c.data.cohort_manifest + "' does not exist");
        }
    }

    if (root.contains("resize")) {
        std::vector<int> r;
        rd.read(root, {}, "resize", r);
        if (r.size() != 2 || r[0] < 2 || r[1] < 2) {
            rd.fail({"resize"}, "expected [nx, ny] with both >= 2");
        }
        c.resize = {static_cast<std::size_t>(r[0]), static_cast<std::size_t>(r[1])};
    }

    if (root.contains("wavelet")) {
        const auto& w = root.at("wavelet");
        const std::vector<std::string> p{"wavelet"};
        rd.require_object(w, p, {"levels", "detail_rule"});
        rd.read(w, p, "levels", c.wavelet.levels);
        if (c.wavelet.levels < 1) {
            rd.fail({"wavelet", "levels"}, "must be at least 1");
        }
        std::string rule = "mean";
        rd.read(w, p, "detail_rule", rule);
        if (rule == "mean") {
            c.wavelet.detail_rule = DetailRule::Mean;
        } else if (rule == "max_abs") {
            c.wavelet.detail_rule = DetailRule::MaxAbs;
        } else {
            rd.fail({"wavelet", "detail_rule"}, "must be \"mean\" or \"max_abs\"");
        }
    }

    if (root.contains("discretization")) {
        const auto& d = root.at("discretization");
        const std::vector<std::string> p{"discretization"};
        rd.require_object(d, p, {"policy", "bins", "width"});
        std::string policy = "bin_count";
        rd.read(d, p, "policy", policy);
        if (policy == "bin_count") {
            radiomics::FixedBinCount b;
            rd.read(d, p, "bins", b.bins);
            if (b.bins < 1) {
                rd.fail({"discretization", "bins"}, "must be at least 1");
            }
            c.extraction.binning = b;
        } else if (policy == "bin_width") {
            radiomics::FixedBinWidth b;
            rd.read(d, p, "width", b.width);
            if (!(b.width > 0.0)) {
                rd.fail({"discretization", "width"}, "must be positive");
            }
            c.extraction.binning = b;
        } else {
            rd.fail({"discretization", "policy"}, "must be \"bin_count\" or \"bin_width\"");
        }
    }
    rd.read(root, {}, "gldm_alpha", c.extraction.gldm_alpha);
    if (c.extraction.gldm_alpha < 0) {
        rd.fail({"gldm_alpha"}, "must be non-negative");
    }

    if (root.contains("roi")) {
        const auto& r = root.at("roi");
        const std::vector<std::string> p{"roi"};
        rd.require_object(r, p, {"roi2_labels", "roi3_labels"});
        rd.read(r, p, "roi2_labels", c.roi.roi2);
        rd.read(r, p, "roi3_labels", c.roi.roi3);
        if (c.roi.roi2.empty() || c.roi.roi3.empty()) {
            rd.fail(p, "label lists must be nonempty");
        }
    }

    if (root.contains("pca")) {
        const auto& q = root.at("pca");
        const std::vector<std::string> p{"pca"};
        rd.require_object(q, p, {"standardize", "variance_threshold", "feature_mode", "per_grade_loadings", "top_loadings"});
        rd.read(q, p, "standardize", c.reduction.standardize);
        rd.read(q, p, "variance_threshold", c.reduction.variance_threshold);
        if (!(c.reduction.variance_threshold > 0.0 && c.reduction.variance_threshold <= 1.0)) {
            rd.fail({"pca", "variance_threshold"}, "must be in (0, 1]");
        }
        std::string mode = "pca";
        rd.read(q, p, "feature_mode", mode);
        try {
            c.reduction.mode = evaluation::parse_feature_mode(mode);
        } catch (const Error&) {
            rd.fail({"pca", "feature_mode"}, "must be \"pca\", \"energy_roi2\" or \"raw\"");
        }
        rd.read(q, p, "per_grade_loadings", c.per_grade_loadings);
        rd.read(q, p, "top_loadings", c.top_loadings);
    }

    if (root.contains("classifiers")) {
        const auto& cl = root.at("classifiers");
        const std::vector<std::string> p{"classifiers"};
        rd.require_object(cl, p, {"enabled", "gbt", "svc", "rf"});
        if (cl.contains("enabled")) {
            const auto& e = cl.at("enabled");
            if (!e.is_array() || e.empty()) {
                rd.fail({"classifiers", "enabled"}, "expected a nonempty array");
            }
            c.classifiers.clear();
            for (const auto& name : e) {
                try {
                    c.classifiers.push_back(classifiers::parse_classifier_kind(name.is_string() ? name.get<std::string>() : ""));
                } catch (const Error&) {
                    rd.fail({"classifiers", "enabled"}, "entries must be \"gbt\", \"svc\" or \"rf\"");
                }
            }
        }
        if (cl.contains("gbt")) {
            const auto& g = cl.at("gbt");
            const std::vector<std::string> gp{"classifiers", "gbt"};
            rd.require_object(g, gp, {"n_trees", "max_depth", "learning_rate", "lambda", "gamma", "min_child_weight"});
            rd.read(g, gp, "n_trees", c.gbt.n_trees);
            rd.read(g, gp, "max_depth", c.gbt.max_depth);
            rd.read(g, gp, "learning_rate", c.gbt.learning_rate);
            rd.read(g, gp, "lambda", c.gbt.lambda);
            rd.read(g, gp, "gamma", c.gbt.gamma);
            rd.read(g, gp, "min_child_weight", c.gbt.min_child_weight);
            if (c.gbt.n_trees < 0 || c.gbt.max_depth < 0 || !(c.gbt.learning_rate > 0.0) || c.gbt.lambda < 0.0) {
                rd.fail(gp, "n_trees, max_depth >= 0, learning_rate > 0, lambda >= 0 required");
            }
        }
        if (cl.contains("svc")) {
            const auto& s = cl.at("svc");
            const std::vector<std::string> sp{"classifiers", "svc"};
            rd.require_object(s, sp, {"c", "tolerance", "gamma", "shrinking", "max_iterations", "coarse_tolerance"});
            bool coarse = false;
            rd.read(s, sp, "coarse_tolerance", coarse);
            if (coarse) {
                c.svc = classifiers::SvcConfig::coarse_tolerance();
            }
            rd.read(s, sp, "c", c.svc.c);
            rd.read(s, sp, "tolerance", c.svc.tolerance);
            rd.read(s, sp, "gamma", c.svc.gamma);
            rd.read(s, sp, "shrinking", c.svc.shrinking);
            rd.read(s, sp, "max_iterations", c.svc.max_iterations);
            if (!(c.svc.c > 0.0) || !(c.svc.tolerance > 0.0) || c.svc.gamma < 0.0) {
                rd.fail(sp, "c > 0, tolerance > 0, gamma >= 0 required");
            }
        }
        if (cl.contains("rf")) {
            const auto& r = cl.at("rf");
            const std::vector<std::string> rp{"classifiers", "rf"};
            rd.require_object(r, rp, {"n_trees", "max_features", "min_samples_split", "min_samples_leaf", "seed"});
            rd.read(r, rp, "n_trees", c.rf.n_trees);
            rd.read(r, rp, "max_features", c.rf.max_features);
            rd.read(r, rp, "min_samples_split", c.rf.min_samples_split);
            rd.read(r, rp, "min_samples_leaf", c.rf.min_samples_leaf);
            rd.read(r, rp, "seed", c.rf.seed);
            if (c.rf.n_trees < 1 || c.rf.max_features < 0 || c.rf.min_samples_split < 2 || c.rf.min_samples_leaf < 1) {
                rd.fail(rp, "n_trees >= 1, max_features >= 0, min_samples_split >= 2, min_samples_leaf >= 1 required");
            }
        }
    }

    if (root.contains("cv")) {
        const auto& v = root.at("cv");
        const std::vector<std::string> p{"cv"};
        rd.require_object(v, p, {"k", "seed"});
        long long k = 5;
        if (v.contains("k") && !v.at("k").is_number_integer()) {
            rd.fail({"cv", "k"}, "expected an integer");
        }
        if (v.contains("k")) {
            k = v.at("k").get<long long>();
        }
        if (k < 2) {
            rd.fail({"cv", "k"}, "must be at least 2");
        }
        c.k = static_cast<std::size_t>(k);
        rd.read(v, p, "seed", c.cv_seed);
    }
    rd.read(root, {}, "output", c.output);
    rd.read(root, {}, "workers", c.workers);
    return c;
}

/// Canonical JSON form; keys are sorted so the dump is stable.
inline nlohmann::json to_json(const PipelineConfig& c)
{
    nlohmann::json j;
    j["data"] = {{"source", c.data.source == DataSource::Synthetic ? "synthetic" : "nifti"},
                 {"n_hgg", c.data.n_hgg},
                 {"n_lgg", c.data.n_lgg},
                 {"seed", c.data.seed},
                 {"dims", {c.data.dims.nx, c.data.dims.ny, c.data.dims.nz}},
                 {"cohort_manifest", c.data.cohort_manifest},
                 {"hgg_dir", c.data.hgg_dir},
                 {"lgg_dir", c.data.lgg_dir},
                 {"pattern", c.data.pattern},
                 {"subjects", c.data.subjects}};
    j["resize"] = {c.resize.nx, c.resize.ny};
    j["wavelet"] = {{"levels", c.wavelet.levels},
                    {"detail_rule", c.wavelet.detail_rule == DetailRule::Mean ? "mean" : "max_abs"}};
    if (const auto* b = std::get_if<radiomics::FixedBinCount>(&c.extraction.binning)) {
        j["discretization"] = {{"policy", "bin_count"}, {"bins", b->bins}};
    } else {
        j["discretization"] = {{"policy", "bin_width"}, {"width", std::get<radiomics::FixedBinWidth>(c.extraction.binning).width}};
    }
    j["gldm_alpha"] = c.extraction.gldm_alpha;
    j["roi"] = {{"roi2_labels", c.roi.roi2}, {"roi3_labels", c.roi.roi3}};
    j["pca"] = {{"standardize", c.reduction.standardize},
                {"variance_threshold", c.reduction.variance_threshold},
                {"feature_mode", evaluation::to_string(c.reduction.mode)},
                {"per_grade_loadings", c.per_grade_loadings},
                {"top_loadings", c.top_loadings}};
    nlohmann::json enabled = nlohmann::json::array();
    for (auto k : c.classifiers) {
        enabled.push_back(classifiers::to_string(k));
    }
    j["classifiers"] = {{"enabled", enabled},
                        {"gbt",
                         {{"n_trees", c.gbt.n_trees},
                          {"max_depth", c.gbt.max_depth},
                          {"learning_rate", c.gbt.learning_rate},
                          {"lambda", c.gbt.lambda},
                          {"gamma", c.gbt.gamma},
                          {"min_child_weight", c.gbt.min_child_weight}}},
                        {"svc",
                         {{"c", c.svc.c},
                          {"tolerance", c.svc.tolerance},
                          {"gamma", c.svc.gamma},
                          {"shrinking", c.svc.shrinking},
                          {"max_iterations", c.svc.max_iterations}}},
                        {"rf",
                         {{"n_trees", c.rf.n_trees},
                          {"max_features", c.rf.max_features},
                          {"min_samples_split", c.rf.min_samples_split},
                          {"min_samples_leaf", c.rf.min_samples_leaf},
                          {"seed", c.rf.seed}}}};
    j["cv"] = {{"k", c.k}, {"seed", c.cv_seed}};
    j["output"] = c.output;
    j["workers"] = c.workers;
    return j;
}

/// Hash of the canonical config, excluding settings that cannot change numeric outputs.
inline std::string config_hash(const PipelineConfig& c)
{
    auto j = to_json(c);
    j.erase("workers");
    j.erase("output");
    return hash_hex(j.dump());
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MissingInput, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Loads a config file, or a run manifest whose embedded config must match its recorded hash.
inline PipelineConfig load_config(const std::filesystem::path& path)
{
    const std::string text = read_text(path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("config_hash") && j.contains("config")) {
        const auto c = parse_config(j.at("config").dump(2), path.string() + " (embedded config)");
        if (config_hash(c) != j.at("config_hash").get<std::string>()) {
            throw Error(ErrorCode::InvalidConfig, path.string() + ": config hash mismatch; manifest was edited or is corrupt");
        }
        return c;
    }
    return parse_config(text, path.string());
}

} // namespace gliofuse
