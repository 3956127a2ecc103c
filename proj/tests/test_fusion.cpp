#include <gtest/gtest.h>

#include <random>

#include "mbio/error.hpp"
#include "mbio/fusion.hpp"

using namespace mbio;
using fusion::FusionParams;

namespace {

MatchScore fp_score(double v) { return {v, Polarity::Similarity, Trait::Fingerprint}; }
MatchScore iris_hd(double v) { return {v, Polarity::Dissimilarity, Trait::Iris}; }

}  // namespace

TEST(Similarity, PolarityMapping) {
    EXPECT_DOUBLE_EQ(fusion::to_similarity(fp_score(0.8)), 0.8);
    EXPECT_DOUBLE_EQ(fusion::to_similarity(iris_hd(0.0)), 1.0);
    EXPECT_DOUBLE_EQ(fusion::to_similarity(iris_hd(0.5)), 0.5);
}

TEST(MinMax, EndpointsMidpointAndClamp) {
    EXPECT_DOUBLE_EQ(fusion::min_max_normalize(0.2, 0.2, 0.6), 0.0);
    EXPECT_DOUBLE_EQ(fusion::min_max_normalize(0.6, 0.2, 0.6), 1.0);
    EXPECT_DOUBLE_EQ(fusion::min_max_normalize(0.4, 0.2, 0.6), 0.5);
    EXPECT_DOUBLE_EQ(fusion::min_max_normalize(0.1, 0.2, 0.6), 0.0);
    EXPECT_DOUBLE_EQ(fusion::min_max_normalize(0.9, 0.2, 0.6), 1.0);
    const auto v = fusion::min_max_normalize(std::vector<double>{0.2, 0.4, 0.6}, 0.2, 0.6);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_DOUBLE_EQ(v[0], 0.0);
    EXPECT_NEAR(v[1], 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(v[2], 1.0);
}

TEST(MinMax, DegenerateBoundsAreACalibrationError) {
    try {
        fusion::min_max_normalize(0.5, 0.6, 0.6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Calibration);
    }
    EXPECT_THROW(fusion::min_max_normalize(std::vector<double>{0.1}, 0.7, 0.2), Error);
}

TEST(Fuse, WorkedExamples) {
    const FusionParams p;
    const auto perfect = fusion::fuse(fp_score(1.0), iris_hd(0.0), p);
    EXPECT_DOUBLE_EQ(perfect.fused_score, 1.0);
    EXPECT_TRUE(perfect.accept);

    const auto split = fusion::fuse(fp_score(1.0), iris_hd(1.0), p);
    EXPECT_DOUBLE_EQ(split.fused_score, 0.4);
    EXPECT_FALSE(split.accept);

    const auto weak = fusion::fuse(fp_score(0.0), iris_hd(0.5), p);
    EXPECT_NEAR(weak.fused_score, 0.30, 1e-12);
    EXPECT_DOUBLE_EQ(weak.fp_component, 0.0);
    EXPECT_DOUBLE_EQ(weak.iris_component, 0.5);
}

TEST(Fuse, ThresholdIsInclusive) {
    FusionParams p;
    p.threshold = 0.3;
    const auto d = fusion::fuse(fp_score(0.0), iris_hd(0.5), p);
    EXPECT_EQ(d.accept, d.fused_score >= p.threshold);
}

TEST(Fuse, MissingTraitContributesZero) {
    const FusionParams p;
    const auto no_iris = fusion::fuse(std::optional<MatchScore>{fp_score(0.9)}, std::nullopt, p);
    EXPECT_NEAR(no_iris.fused_score, 0.4 * 0.9, 1e-12);
    EXPECT_FALSE(no_iris.accept);
    const auto no_fp = fusion::fuse(std::nullopt, std::optional<MatchScore>{iris_hd(0.1)}, p);
    EXPECT_NEAR(no_fp.fused_score, 0.6 * 0.9, 1e-12);
    EXPECT_TRUE(no_fp.accept);
    EXPECT_DOUBLE_EQ(fusion::fuse(std::nullopt, std::nullopt, p).fused_score, 0.0);
}

TEST(Fuse, MinMaxIsApplied) {
    FusionParams p;
    p.normalization = fusion::Normalization::MinMax;
    p.fp_bounds = {0.1, 0.5};
    p.iris_bounds = {0.5, 0.7};
    const auto d = fusion::fuse(fp_score(0.3), iris_hd(0.4), p);  // iris similarity 0.6
    EXPECT_NEAR(d.fp_component, 0.5, 1e-12);
    EXPECT_NEAR(d.iris_component, 0.5, 1e-12);
    EXPECT_NEAR(d.fused_score, 0.5, 1e-12);
}

TEST(Fuse, WeightValidation) {
    FusionParams p;
    p.w_fp = 0.5;
    EXPECT_THROW(p.validate(), Error);
    EXPECT_THROW(fusion::fuse(fp_score(0.1), iris_hd(0.1), p), Error);
    p.w_fp = -0.2;
    p.w_iris = 1.2;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.threshold = 1.5;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.normalization = fusion::Normalization::MinMax;
    p.iris_bounds = {0.8, 0.8};
    EXPECT_THROW(p.validate(), Error);
}

TEST(Fuse, RangeAndMonotonicity) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const FusionParams p;
    for (int i = 0; i < 2000; ++i) {
        const double f = u(rng);
        const double h = u(rng);
        const double d = 0.05 * u(rng);
        const auto base = fusion::fuse(fp_score(f), iris_hd(h), p);
        EXPECT_GE(base.fused_score, 0.0);
        EXPECT_LE(base.fused_score, 1.0);
        EXPECT_GE(fusion::fuse(fp_score(std::min(1.0, f + d)), iris_hd(h), p).fused_score, base.fused_score);
        EXPECT_GE(fusion::fuse(fp_score(f), iris_hd(std::max(0.0, h - d)), p).fused_score, base.fused_score);
    }
}

TEST(Fuse, DegenerateWeightsFollowOneTrait) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FusionParams fp_only;
    fp_only.w_fp = 1.0;
    fp_only.w_iris = 0.0;
    FusionParams iris_only;
    iris_only.w_fp = 0.0;
    iris_only.w_iris = 1.0;
    for (int i = 0; i < 500; ++i) {
        const double f = u(rng);
        const double h = u(rng);
        EXPECT_EQ(fusion::fuse(fp_score(f), iris_hd(h), fp_only).accept, f >= 0.5);
        EXPECT_EQ(fusion::fuse(fp_score(f), iris_hd(h), iris_only).accept, 1.0 - h >= 0.5);
    }
}

TEST(Fuse, AffineRescalingKeepsDecisions) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FusionParams a;
    a.normalization = fusion::Normalization::MinMax;
    a.fp_bounds = {0.2, 0.8};
    a.iris_bounds = {0.3, 0.9};
    // The same positive affine map applied to scores and bounds.
    const double scale = 0.5;
    const double shift = 0.1;
    auto g = [&](double s) { return scale * s + shift; };
    FusionParams b = a;
    b.fp_bounds = {g(0.2), g(0.8)};
    b.iris_bounds = {g(0.3), g(0.9)};
    for (int i = 0; i < 500; ++i) {
        const double f = u(rng);
        const double s = u(rng);
        const auto da = fusion::fuse(fp_score(f), iris_hd(1.0 - s), a);
        const auto db = fusion::fuse(fp_score(g(f)), iris_hd(1.0 - g(s)), b);
        EXPECT_EQ(da.accept, db.accept);
        EXPECT_NEAR(da.fused_score, db.fused_score, 1e-12);
    }
}
