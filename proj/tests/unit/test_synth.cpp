#include <set>

#include <gtest/gtest.h>

#include "gliofuse/synth.hpp"

using namespace gliofuse;

namespace {

double core_variance(const SubjectCase& sc)
{
    double s = 0, s2 = 0, n = 0;
    for (std::size_t i = 0; i < sc.seg.size(); ++i) {
        if (sc.seg[i] == 1.0) {
            s += sc.flair[i];
            s2 += sc.flair[i] * sc.flair[i];
            n += 1;
        }
    }
    const double m = s / n;
    return s2 / n - m * m;
}

} // namespace

TEST(Synth, DeterministicPerSeed)
{
    const auto a = synth_subject(0, Grade::HGG);
    const auto b = synth_subject(0, Grade::HGG);
    EXPECT_EQ(a.flair, b.flair);
    EXPECT_EQ(a.t1, b.t1);
    EXPECT_EQ(a.t1ce, b.t1ce);
    EXPECT_EQ(a.t2, b.t2);
    EXPECT_EQ(a.seg, b.seg);
    EXPECT_NE(synth_subject(1, Grade::HGG).flair, a.flair);
}

TEST(Synth, SegmentationHasAllLabels)
{
    const auto sc = synth_subject(0, Grade::HGG);
    std::set<double> labels(sc.seg.data().begin(), sc.seg.data().end());
    EXPECT_EQ(labels, (std::set<double>{0, 1, 2, 4}));
    EXPECT_NO_THROW(sc.validate());
}

TEST(Synth, HighGradeCoreIsMoreHeterogeneous)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double h = core_variance(synth_subject(seed, Grade::HGG));
        const double l = core_variance(synth_subject(seed, Grade::LGG));
        EXPECT_GT(h, l) << "seed " << seed;
    }
}

TEST(Synth, CohortManifestRoundTrip)
{
    const auto m = make_cohort(3, 2, 7, {32, 32, 4});
    ASSERT_EQ(m.subjects.size(), 5U);
    const auto back = cohort_from_json(to_json(m));
    EXPECT_EQ(to_json(back), to_json(m));
}
