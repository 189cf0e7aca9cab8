// gliofuse command-line driver: one subcommand per pipeline stage plus the full pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gliofuse/pipeline.hpp"

namespace {

using namespace gliofuse;

struct Options {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> subjects;
};

PipelineConfig resolve(const Options& o)
{
    auto cfg = load_config(o.config);
    if (o.out) {
        cfg.output = *o.out;
    }
    if (o.seed) {
        cfg.cv_seed = *o.seed;
        cfg.data.seed = *o.seed;
    }
    if (o.subjects) {
        cfg.data.subjects = *o.subjects;
    }
    return cfg;
}

FeatureTable saved_features(const PipelineConfig& cfg)
{
    const auto path = std::filesystem::path(cfg.output) / "features.csv";
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::MissingInput, path.string() + " not found; run `gliofuse extract` first");
    }
    return read_feature_table(path);
}

void print_metrics(const std::string& label, const evaluation::MetricSet& m)
{
    std::printf("%-12s accuracy %.4f  precision %.4f  recall %.4f  f1 %.4f  specificity %.4f  auc %.4f\n", label.c_str(),
                m.accuracy, m.precision, m.recall, m.f1, m.specificity, m.auc);
}

void print_report(const evaluation::EvalReport& r)
{
    print_metrics(r.classifier + " cv", r.mean);
    if (r.training) {
        print_metrics(r.classifier + " train", *r.training);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gliofuse: wavelet-fused multi-sequence MRI radiomics for HGG/LGG grading"};
    app.require_subcommand(1);
    Options opt;
    const Logger log = [](const std::string& line) { std::cerr << line << '\n'; };

    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "Pipeline config JSON, or a run manifest to replay")->required();
        sub->add_option("--out", opt.out, "Output directory (overrides the config)");
        sub->add_option("--seed", opt.seed, "Seed for cross-validation and the synthetic cohort");
        sub->add_option("--subjects", opt.subjects, "Glob over subject ids");
        return sub;
    };
    auto* synth = add("synth", "Write the synthetic cohort as NIfTI folders");
    auto* fuse = add("fuse", "Fuse modalities and write fused volumes and ROI masks");
    auto* extract = add("extract", "Extract the 321-feature table");
    auto* pca_cmd = add("pca", "Fit PCA on the saved feature table");
    auto* train = add("train", "Train each classifier on every row of the saved feature table");
    auto* evaluate = add("evaluate", "Cross-validate, reusing saved folds and models when present");
    auto* pipeline = add("pipeline", "Run every stage end to end");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = resolve(opt);
        if (synth->parsed()) {
            stage_synth(cfg, log);
        } else if (fuse->parsed()) {
            stage_fuse(cfg, log);
        } else if (extract->parsed()) {
            const auto r = stage_extract(cfg, log);
            std::printf("%zu subjects, %zu skipped -> %s\n", r.table.rows.size(), r.skipped.size(),
                        (std::filesystem::path(cfg.output) / "features.csv").c_str());
        } else if (pca_cmd->parsed()) {
            const auto r = stage_pca(cfg, saved_features(cfg), log);
            std::printf("%zu components kept; PC1 explains %.4f\n", r.selected, r.pooled.explained_ratio.at(0));
        } else if (train->parsed()) {
            const auto table = saved_features(cfg);
            for (auto k : cfg.classifiers) {
                print_metrics(std::string(classifiers::to_string(k)) + " train", stage_train(cfg, table, k));
            }
        } else if (evaluate->parsed()) {
            const auto table = saved_features(cfg);
            for (auto k : cfg.classifiers) {
                print_report(stage_evaluate(cfg, table, k, true, log).report);
            }
        } else if (pipeline->parsed()) {
            const auto b = run_pipeline(cfg, log);
            for (const auto& [name, r] : b.reports) {
                print_report(r);
            }
            std::printf("outputs in %s\n", b.output.c_str());
        }
    } catch (const gliofuse::Error& e) {
        std::cerr << "gliofuse: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "gliofuse: unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
