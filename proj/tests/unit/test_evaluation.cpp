#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "gliofuse/evaluation/cross_validate.hpp"
#include "gliofuse/evaluation/stats.hpp"
#include "oracles/stats_oracle.hpp"
#include "support/fixtures.hpp"

using namespace gliofuse;
using namespace gliofuse::evaluation;

namespace {

std::vector<int> labels(std::size_t hgg, std::size_t lgg)
{
    std::vector<int> y(hgg, 1);
    y.insert(y.end(), lgg, 0);
    return y;
}

void expect_balanced(const Folds& f, const std::vector<int>& y)
{
    const double k = static_cast<double>(f.k());
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double neg = static_cast<double>(y.size()) - pos;
    std::vector<std::size_t> seen(y.size(), 0);
    for (std::size_t i = 0; i < f.k(); ++i) {
        EXPECT_LT(std::fabs(static_cast<double>(f.class_counts[i][1]) - pos / k), 1.0);
        EXPECT_LT(std::fabs(static_cast<double>(f.class_counts[i][0]) - neg / k), 1.0);
        for (auto r : f.test[i]) {
            ++seen[r];
        }
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](std::size_t s) { return s == 1; }));
}

} // namespace

TEST(Folds, BratsSizedCohort)
{
    const auto y = labels(210, 75);
    const auto f = stratified_kfold(y, 5, 0);
    ASSERT_EQ(f.k(), 5U);
    for (const auto& c : f.class_counts) {
        EXPECT_EQ(c[1], 42U);
        EXPECT_EQ(c[0], 15U);
    }
    expect_balanced(f, y);
}

TEST(Folds, SmallCohorts)
{
    const auto even = stratified_kfold(labels(10, 10), 5, 0);
    for (const auto& c : even.class_counts) {
        EXPECT_EQ(c[0], 2U);
        EXPECT_EQ(c[1], 2U);
    }
    const auto y = labels(7, 3);
    expect_balanced(stratified_kfold(y, 3, 0), y);
}

TEST(Folds, RandomLabelSetsStayWithinOne)
{
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + uniform_index(rng, 9);
        std::vector<int> y;
        const std::size_t n = 2 * k + uniform_index(rng, 200);
        for (std::size_t i = 0; i < n; ++i) {
            y.push_back(uniform01(rng) < 0.3 ? 0 : 1);
        }
        if (static_cast<std::size_t>(std::count(y.begin(), y.end(), 0)) < k ||
            static_cast<std::size_t>(std::count(y.begin(), y.end(), 1)) < k) {
            continue;
        }
        expect_balanced(stratified_kfold(y, k, trial), y);
    }
}

TEST(Folds, ErrorsAndDeterminism)
{
    EXPECT_THROW(stratified_kfold(labels(5, 5), 1, 0), Error);
    EXPECT_THROW(stratified_kfold(labels(10, 2), 5, 0), Error);
    const auto y = labels(20, 9);
    EXPECT_EQ(stratified_kfold(y, 4, 3), stratified_kfold(y, 4, 3));
    EXPECT_EQ(folds_from_json(to_json(stratified_kfold(y, 4, 3))), stratified_kfold(y, 4, 3));
}

TEST(Confusion, Counts)
{
    const std::vector<int> truth{1, 1, 1, 0, 0};
    EXPECT_EQ(confusion(truth, truth), (ConfusionMatrix{3, 0, 0, 2}));
    const std::vector<int> all_hgg{1, 1};
    const std::vector<int> mixed{1, 0};
    EXPECT_EQ(confusion(all_hgg, mixed), (ConfusionMatrix{1, 0, 1, 0}));
    EXPECT_THROW(confusion(all_hgg, truth), Error);
}

TEST(Metrics, PublishedConfusionMatrix)
{
    const auto m = metrics(ConfusionMatrix{202, 8, 20, 55});
    EXPECT_NEAR(m.accuracy, 0.9018, 5e-5);
    EXPECT_NEAR(m.precision, 0.9099, 5e-5);
    EXPECT_NEAR(m.recall, 0.9619, 5e-5);
    EXPECT_NEAR(m.f1, 0.9352, 5e-5);
    EXPECT_NEAR(m.specificity, 0.7333, 5e-5);
}

TEST(Metrics, PerfectAndUndefined)
{
    const auto p = metrics(ConfusionMatrix{7, 0, 0, 4});
    for (double v : {p.accuracy, p.precision, p.recall, p.f1, p.specificity}) {
        EXPECT_EQ(v, 1.0);
    }
    const auto u = metrics(ConfusionMatrix{0, 0, 5, 5});
    EXPECT_EQ(u.precision, 0.0);
    EXPECT_TRUE(u.precision_defined);
    EXPECT_FALSE(u.recall_defined);
    EXPECT_EQ(u.specificity, 0.5);
    EXPECT_TRUE(u.specificity_defined);
}

TEST(Roc, SeparatingTiedAndRandom)
{
    const std::vector<int> y{1, 1, 0, 0};
    const std::vector<double> sep{0.9, 0.8, 0.2, 0.1};
    EXPECT_EQ(roc_auc(sep, y).auc, 1.0);
    const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
    const auto c = roc_auc(flat, y);
    EXPECT_EQ(c.auc, 0.5);
    EXPECT_EQ(c.points.size(), 2U);

    Rng rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s(20);
        std::vector<int> t(20);
        for (std::size_t i = 0; i < 20; ++i) {
            s[i] = static_cast<double>(uniform_index(rng, 6)) / 5.0;
            t[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(uniform_index(rng, 2));
        }
        EXPECT_EQ(roc_auc(s, t).auc, oracle::mann_whitney(s, t));
    }
    const std::vector<int> one{1, 1};
    const std::vector<double> two{0.1, 0.2};
    EXPECT_THROW(roc_auc(two, one), Error);
}

TEST(CrossValidate, SeparableCohortAllClassifiers)
{
    const auto data = fixtures::gaussian_clusters(0);
    const std::vector<std::string> names{"x0", "x1"};
    ReductionConfig red;
    red.mode = FeatureMode::Raw;
    const auto folds = stratified_kfold(data.y, 5, 0);
    for (auto kind : classifiers::kAllClassifiers) {
        const auto r = cross_validate(data.x, data.y, names, red, classifiers::default_config(kind), folds, 0);
        EXPECT_GE(r.report.mean.accuracy, 0.95) << classifiers::to_string(kind);
    }
}

TEST(CrossValidate, ShuffledLabelsGiveChanceAuc)
{
    // Per-fold AUC on 20 noise rows swings widely, so average over several datasets.
    double sum = 0.0;
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        Rng rng(seed);
        Matrix x(100, 3);
        std::vector<int> y(100);
        for (std::size_t i = 0; i < 100; ++i) {
            for (std::size_t c = 0; c < 3; ++c) {
                x(i, c) = normal(rng);
            }
            y[i] = i % 2 == 0 ? 1 : 0;
        }
        shuffle(std::span<int>(y), rng);
        ReductionConfig red;
        red.mode = FeatureMode::Raw;
        sum += cross_validate(x, y, {"a", "b", "c"}, red, classifiers::SvcConfig{}, stratified_kfold(y, 5, 0), 0).report.mean.auc;
    }
    EXPECT_NEAR(sum / 10.0, 0.5, 0.1);
}

TEST(CrossValidate, SameSeedSameReport)
{
    const auto data = fixtures::gaussian_clusters(6, 30);
    ReductionConfig red;
    classifiers::RfConfig rf;
    rf.n_trees = 40;
    const auto f = stratified_kfold(data.y, 5, 4);
    const auto a = cross_validate(data.x, data.y, {"a", "b"}, red, rf, f, 4);
    const auto b = cross_validate(data.x, data.y, {"a", "b"}, red, rf, f, 4);
    EXPECT_EQ(to_json(a.report).dump(), to_json(b.report).dump());
}

TEST(Stats, Pearson)
{
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> neg{-1, -2, -3, -4};
    const std::vector<double> y{1, 3, 2, 4};
    EXPECT_DOUBLE_EQ(pearson_r(x, x), 1.0);
    EXPECT_DOUBLE_EQ(pearson_r(x, neg), -1.0);
    EXPECT_NEAR(pearson_r(x, y), 0.8, 1e-12);
    EXPECT_NEAR(pearson_r(x, y), oracle::pearson(x, y), 1e-12);
    const std::vector<double> flat{2, 2, 2, 2};
    EXPECT_THROW(pearson_r(x, flat), Error);
    EXPECT_THROW(pearson_r(x, std::vector<double>{1, 2}), Error);
}

TEST(Stats, DescriptiveSummary)
{
    const std::vector<double> sym{1, 2, 3, 4, 5};
    const auto s = descriptive_stats(sym);
    EXPECT_NEAR(s.skewness, 0.0, 1e-12);
    EXPECT_EQ(s.median, 3.0);
    EXPECT_EQ(s.iqr, 2.0);

    const std::vector<double> tail{1, 2, 3, 4, 100};
    const auto t = descriptive_stats(tail);
    EXPECT_GT(t.skewness, 0.0);
    EXPECT_NEAR(t.skewness, oracle::adjusted_skewness(tail), 1e-12);
    EXPECT_EQ(t.outliers, std::vector<double>{100});
    EXPECT_EQ(t.whisker_high, 4.0);
}
