#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "gliofuse/config.hpp"

using namespace gliofuse;

namespace {

std::string message_of(std::string_view text)
{
    try {
        parse_config(text, "cfg.json");
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
        return e.what();
    }
    ADD_FAILURE() << "config accepted";
    return {};
}

} // namespace

TEST(Config, DefaultsFromEmptyObject)
{
    const auto c = parse_config("{}");
    EXPECT_EQ(c.k, 5U);
    EXPECT_EQ(c.data.n_hgg, 30U);
    EXPECT_EQ(c.data.n_lgg, 10U);
    EXPECT_EQ(c.reduction.variance_threshold, 0.85);
    EXPECT_EQ(c.classifiers.size(), 3U);
    EXPECT_EQ(c.gbt.n_trees, 1000);
    EXPECT_EQ(c.rf.n_trees, 1000);
}

TEST(Config, RejectsBadValuesWithLocation)
{
    EXPECT_NE(message_of("{\n  \"cv\": {\"k\": 1}\n}").find("cfg.json:2: cv.k"), std::string::npos);
    EXPECT_NE(message_of("{\n \"cv\": {\n  \"sed\": 3\n }\n}").find("cv.sed: unknown key"), std::string::npos);
    EXPECT_NE(message_of("{\n  \"cv\": {\"k\": 5,}\n}").find("cfg.json:2:"), std::string::npos);
    message_of(R"({"pca": {"variance_threshold": 0}})");
    message_of(R"({"classifiers": {"enabled": ["knn"]}})");
    message_of(R"({"data": {"source": "nifti"}})");
    message_of(R"({"discretization": {"policy": "bin_width", "width": -1}})");
}

TEST(Config, CanonicalFormRoundTrips)
{
    const auto c = parse_config(R"({"data": {"n_hgg": 4, "n_lgg": 3, "dims": [32, 32, 4]},
        "resize": [32, 32], "discretization": {"policy": "bin_width", "width": 10},
        "classifiers": {"enabled": ["svc"], "svc": {"coarse_tolerance": true}}, "cv": {"k": 3, "seed": 9}})");
    EXPECT_EQ(c.svc.tolerance, 1e-1);
    const auto again = parse_config(to_json(c).dump());
    EXPECT_EQ(to_json(again), to_json(c));
    EXPECT_EQ(config_hash(again), config_hash(c));
}

TEST(Config, HashIgnoresOutputAndWorkers)
{
    auto a = parse_config("{}");
    auto b = a;
    b.output = "elsewhere";
    b.workers = 7;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.k = 3;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, ManifestReplayDetectsEdits)
{
    const auto c = parse_config(R"({"cv": {"k": 4}})");
    nlohmann::json m{{"config", to_json(c)}, {"config_hash", config_hash(c)}};
    const auto path = std::filesystem::temp_directory_path() / "gliofuse_manifest_cfg.json";
    {
        std::ofstream(path) << m.dump(2);
    }
    EXPECT_EQ(load_config(path).k, 4U);
    m["config"]["cv"]["k"] = 6;
    {
        std::ofstream(path) << m.dump(2);
    }
    try {
        load_config(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("config hash mismatch"), std::string::npos);
    }
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), Error);
}
