#include <gtest/gtest.h>

#include "gliofuse/radiomics/extractor.hpp"
#include "oracles/radiomics_oracle.hpp"
#include "support/fixtures.hpp"

using namespace gliofuse;
using namespace gliofuse::radiomics;

namespace {

oracle::Cells cells_of(const TextureMatrix& m)
{
    oracle::Cells c;
    for (const auto& [k, v] : m.sparse()) {
        c[{k.first, static_cast<int>(k.second)}] = static_cast<long long>(v);
        EXPECT_EQ(v, std::floor(v));
    }
    return c;
}

} // namespace

TEST(RadiomicsOracle, DirectionSetsAgree)
{
    const auto mine = oracle::directions();
    std::set<std::array<int, 3>> a(mine.begin(), mine.end());
    std::set<std::array<int, 3>> b(kDirections.begin(), kDirections.end());
    EXPECT_EQ(a, b);
}

TEST(RadiomicsOracle, MatrixCountsMatchEnumeration)
{
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const auto d = fixtures::random_labels(rng);
        for (const auto& dir : kDirections) {
            EXPECT_EQ(cells_of(glcm_matrix(d, dir)), oracle::glcm_counts(d, dir)) << "trial " << trial;
            EXPECT_EQ(cells_of(glrlm_matrix(d, dir)), oracle::glrlm_counts(d, dir)) << "trial " << trial;
        }
        EXPECT_EQ(cells_of(glszm_matrix(d)), oracle::glszm_counts(d)) << "trial " << trial;
        for (int alpha : {0, 1}) {
            EXPECT_EQ(cells_of(gldm_matrix(d, alpha)), oracle::gldm_counts(d, alpha)) << "trial " << trial;
        }
        const auto ng = ngtdm_matrix(d);
        const auto ref = oracle::ngtdm(d);
        for (int i = 1; i <= d.ng; ++i) {
            EXPECT_EQ(ng.at(i, 0), static_cast<double>(ref.n[static_cast<std::size_t>(i - 1)]));
            EXPECT_TRUE(fixtures::close(ng.at(i, 2), ref.s[static_cast<std::size_t>(i - 1)]));
        }
    }
}

TEST(RadiomicsOracle, FeaturesMatchFormulaEvaluation)
{
    Rng rng(12);
    const auto& names = roi_feature_names();
    for (int trial = 0; trial < 12; ++trial) {
        const auto c = fixtures::random_roi(rng, 0, 8, trial % 2 == 0 ? 6 : 0);
        const auto got = extract_roi_features(superimpose(c.image, c.mask));
        const auto want = oracle::roi_features(c.image, c.mask);
        for (std::size_t k = 0; k < got.size(); ++k) {
            EXPECT_TRUE(fixtures::close(got[k], want[k])) << names[k] << " trial " << trial << ": " << got[k] << " vs " << want[k];
        }
    }
}

TEST(RadiomicsOracle, RotationInvariance)
{
    Rng rng(13);
    const auto rotations = fixtures::cube_rotations();
    ASSERT_EQ(rotations.size(), 24U);
    const auto& names = roi_feature_names();
    for (int trial = 0; trial < 3; ++trial) {
        const auto c = fixtures::random_roi(rng, 7, 8, 5);
        const auto base = extract_roi_features(superimpose(c.image, c.mask));
        for (const auto& r : rotations) {
            const auto rc = fixtures::rotate(c, r);
            const auto f = extract_roi_features(superimpose(rc.image, rc.mask));
            for (std::size_t k = 0; k < f.size(); ++k) {
                EXPECT_TRUE(fixtures::close(f[k], base[k])) << names[k] << ": " << f[k] << " vs " << base[k];
            }
        }
    }
}
