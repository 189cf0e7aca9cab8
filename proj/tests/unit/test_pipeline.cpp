#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <gtest/gtest.h>

#include "gliofuse/pipeline.hpp"

using namespace gliofuse;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

constexpr const char* kSmallConfig = R"({
  "data": {"n_hgg": 8, "n_lgg": 6, "dims": [40, 40, 6]},
  "resize": [40, 40],
  "classifiers": {"gbt": {"n_trees": 25}, "rf": {"n_trees": 40}},
  "cv": {"k": 3, "seed": 0}
})";

PipelineConfig small_config(const fs::path& out)
{
    auto c = parse_config(kSmallConfig);
    c.output = out.string();
    return c;
}

fs::path fresh_dir(const std::string& name)
{
    const auto p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> tree_contents(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).string()] = slurp(e.path());
        }
    }
    return out;
}

} // namespace

TEST(Pipeline, DeterministicBundle)
{
    const auto a = fresh_dir("gliofuse_pipe_a");
    const auto b = fresh_dir("gliofuse_pipe_b");
    const auto ra = run_pipeline(small_config(a));
    run_pipeline(small_config(b));
    EXPECT_EQ(ra.features.rows.size(), 14U);
    EXPECT_EQ(ra.features.width(), 321U);
    EXPECT_EQ(ra.reports.size(), 3U);
    const auto ta = tree_contents(a);
    const auto tb = tree_contents(b);
    ASSERT_EQ(ta.size(), tb.size());
    for (const auto& [name, content] : ta) {
        ASSERT_TRUE(tb.count(name)) << name;
        EXPECT_EQ(content, tb.at(name)) << name;
    }
    for (const char* f : {"features.csv", "scree.csv", "loadings.csv", "pca_model.json", "folds.json", "manifest.json",
                          "report_svc.json", "roc_svc.csv", "metrics_svc.csv", "models/full_svc.json"}) {
        EXPECT_TRUE(ta.count(f)) << f;
    }

    // A rerun hits the stage cache and leaves the outputs untouched.
    const auto again = run_pipeline(small_config(a));
    EXPECT_TRUE(again.extraction_cached);
    EXPECT_EQ(tree_contents(a), ta);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Pipeline, EvaluateReusesSavedModels)
{
    const auto dir = fresh_dir("gliofuse_pipe_eval");
    const auto cfg = small_config(dir);
    const auto bundle = run_pipeline(cfg);
    const std::string before = slurp(dir / "report_gbt.json");
    const auto r = stage_evaluate(cfg, read_feature_table(dir / "features.csv"), classifiers::ClassifierKind::Gbt, true);
    EXPECT_TRUE(r.reused_models);
    EXPECT_EQ(slurp(dir / "report_gbt.json"), before);
    EXPECT_EQ(evaluation::to_json(r.report).dump(), evaluation::to_json(bundle.reports.at("gbt")).dump());
    fs::remove_all(dir);
}

TEST(Pipeline, ScreeRatiosSumToOne)
{
    const auto dir = fresh_dir("gliofuse_pipe_pca");
    const auto cfg = small_config(dir);
    const auto ex = stage_extract(cfg);
    stage_pca(cfg, ex.table);
    std::ifstream in(dir / "scree.csv");
    std::string line;
    std::getline(in, line);
    double sum = 0;
    while (std::getline(in, line)) {
        const auto cells = split_csv_line(line);
        if (cells[0] == "pooled") {
            sum += parse_double(cells[2]);
        }
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    fs::remove_all(dir);
}

TEST(Pipeline, SubjectGlobAndSkips)
{
    const auto dir = fresh_dir("gliofuse_pipe_glob");
    auto cfg = small_config(dir);
    cfg.data.subjects = "SYN_LGG_00[0-2]";
    const auto ex = stage_extract(cfg);
    ASSERT_EQ(ex.table.rows.size(), 3U);
    EXPECT_EQ(ex.table.rows[0].subject_id, "SYN_LGG_000");
    cfg.data.subjects = "nobody";
    EXPECT_EQ(code_of([&] { stage_extract(cfg); }), ErrorCode::MissingInput);
    fs::remove_all(dir);
}

TEST(Pipeline, NiftiCohortMatchesSynthetic)
{
    const auto dir = fresh_dir("gliofuse_pipe_nifti");
    auto cfg = small_config(dir / "synth");
    cfg.data.n_hgg = 2;
    cfg.data.n_lgg = 1;
    stage_synth(cfg);
    const auto direct = stage_extract(cfg).table;

    auto nc = cfg;
    nc.output = (dir / "nifti").string();
    nc.data.source = DataSource::Nifti;
    nc.data.hgg_dir = (dir / "synth" / "cohort" / "HGG").string();
    nc.data.lgg_dir = (dir / "synth" / "cohort" / "LGG").string();
    const auto loaded = stage_extract(nc).table;
    ASSERT_EQ(loaded.rows.size(), direct.rows.size());
    for (std::size_t r = 0; r < direct.rows.size(); ++r) {
        EXPECT_EQ(loaded.rows[r].subject_id, direct.rows[r].subject_id);
        for (std::size_t c = 0; c < direct.width(); ++c) {
            // The cohort is stored as float32, so values agree to single precision.
            EXPECT_NEAR(loaded.rows[r].values[c], direct.rows[r].values[c],
                        1e-3 * (1.0 + std::fabs(direct.rows[r].values[c])))
                << direct.column_names[c];
        }
    }
    fs::remove(nc.data.hgg_dir + "/SYN_HGG_001/SYN_HGG_001_t2.nii.gz");
    try {
        stage_extract(nc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingInput);
        EXPECT_NE(std::string(e.what()).find("SYN_HGG_001"), std::string::npos);
    }
    fs::remove_all(dir);
}

#ifdef GLIOFUSE_CLI_PATH
TEST(Cli, ExtractPcaAndErrors)
{
    const auto dir = fresh_dir("gliofuse_cli");
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << kSmallConfig;
    const std::string cli = GLIOFUSE_CLI_PATH;
    auto run = [&](const std::string& sub, const std::string& extra = "") {
        const std::string cmd = cli + " " + sub + " --config " + (dir / "cfg.json").string() + " --out " +
                                (dir / "out").string() + " " + extra + " > " + (dir / "log.txt").string() + " 2>&1";
        return std::system(cmd.c_str());
    };
    ASSERT_EQ(run("extract", "--subjects SYN_HGG_000"), 0);
    const auto table = read_feature_table(dir / "out" / "features.csv");
    ASSERT_EQ(table.rows.size(), 1U);
    EXPECT_EQ(table.rows[0].values.size(), 321U);

    ASSERT_EQ(run("extract"), 0);
    ASSERT_EQ(run("pca"), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "scree.csv"));

    std::ofstream(dir / "bad.json") << "{\"cv\": {\"k\": 1}}";
    const std::string bad = cli + " pipeline --config " + (dir / "bad.json").string() + " > " + (dir / "log.txt").string() + " 2>&1";
    EXPECT_NE(std::system(bad.c_str()), 0);
    EXPECT_NE(slurp(dir / "log.txt").find("cv.k"), std::string::npos);
    fs::remove_all(dir);
}
#endif
