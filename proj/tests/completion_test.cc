#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "depthkit/completion.h"
#include "depthkit/error.h"
#include "depthkit/knn_grid.h"
#include "depthkit/metrics.h"
#include "depthkit/sparsity.h"
#include "depthkit/synthetic.h"
#include "support/oracles.h"
#include "support/synthetic_suite.h"

namespace depthkit {
namespace {

using testing::BruteKnn;

DepthMap Affine(const DepthMap& d, double a, double b) {
  DepthMap out(d.width(), d.height());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.valid(i)) out.set(i, a * d[i] + b);
  }
  return out;
}

double Objective(const DepthMap& g, const DepthMap& d, double s, double t) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.valid(i) && g.valid(i)) sum += std::pow(s * g[i] + t - d[i], 2);
  }
  return sum;
}

// ---------------------------------------------------------------- fitting

TEST(FitScaleShiftTest, IdentityFit) {
  Rng rng(Seed{1});
  const DepthMap d = testing::RandomDepth(20, 20, rng, 0.5, 6.0, 0.5);
  const AlignmentParams fit = FitScaleShift(d, d);
  EXPECT_NEAR(fit.scale, 1.0, 1e-10);
  EXPECT_NEAR(fit.shift, 0.0, 1e-10);
  EXPECT_EQ(fit.inliers, d.valid_indices());
  EXPECT_NEAR(fit.residual_rms, 0.0, 1e-10);
}

TEST(FitScaleShiftTest, RecoversExactAffine) {
  Rng rng(Seed{2});
  const DepthMap d = testing::RandomDepth(20, 20, rng, 1.0, 6.0, 0.5);
  const DepthMap g = Affine(d, 0.5, -0.25);  // g = (d - 0.5) / 2
  const AlignmentParams fit = FitScaleShift(g, d);
  EXPECT_NEAR(fit.scale, 2.0, 1e-10);
  EXPECT_NEAR(fit.shift, 0.5, 1e-10);
}

TEST(FitScaleShiftTest, TwoPointSystem) {
  const AlignmentParams fit =
      FitScaleShift(DepthMap(2, 1, {1.0, 2.0}), DepthMap(2, 1, {3.0, 5.0}));
  EXPECT_NEAR(fit.scale, 2.0, 1e-12);
  EXPECT_NEAR(fit.shift, 1.0, 1e-12);
}

TEST(FitScaleShiftTest, Errors) {
  EXPECT_THROW(FitScaleShift(DepthMap(2, 1, {1.0, 2.0}), DepthMap(2, 1, {3.0, 0.0})),
               std::invalid_argument);
  EXPECT_THROW(FitScaleShift(DepthMap(3, 1, {2.0, 2.0, 2.0}), DepthMap(3, 1, {1.0, 2.0, 3.0})),
               DegenerateFitError);
  EXPECT_THROW(FitScaleShift(DepthMap(3, 1), DepthMap(2, 1)), std::invalid_argument);
}

// Perturbing the solution in either coordinate never lowers the objective.
TEST(FitScaleShiftTest, LocalOptimalityProperty) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng rng(Seed{s});
    const DepthMap d = testing::RandomDepth(16, 12, rng, 0.5, 8.0, 0.6);
    const DepthMap g = testing::RandomDepth(16, 12, rng, 0.1, 3.0, 0.0);
    const AlignmentParams fit = FitScaleShift(g, d);
    const double best = Objective(g, d, fit.scale, fit.shift);
    for (const double ds : {-1e-4, 1e-4}) {
      EXPECT_GE(Objective(g, d, fit.scale + ds, fit.shift), best);
      EXPECT_GE(Objective(g, d, fit.scale, fit.shift + ds), best);
    }
  }
}

TEST(FitScaleShiftRobustTest, NoOutliersMatchesLeastSquares) {
  const SyntheticScene scene = MakeSyntheticScene(80, 60, Seed{3}, {.guidance_distortion = 0.0});
  const DepthMap sparse = SampleUniform(scene.depth, 300, Seed{4});
  const AlignmentParams ls = FitScaleShift(scene.guidance, sparse);
  const AlignmentParams robust =
      FitScaleShiftRobust(scene.guidance, sparse, CompletionConfig{}, Seed{5});
  EXPECT_NEAR(robust.scale, ls.scale, 1e-8);
  EXPECT_NEAR(robust.shift, ls.shift, 1e-8);
  EXPECT_EQ(robust.inliers.size(), 300u);
}

TEST(FitScaleShiftRobustTest, RejectsInjectedOutliers) {
  int recovered = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SyntheticScene scene =
        MakeSyntheticScene(100, 80, Seed{s}, {.guidance_distortion = 0.0});
    DepthMap sparse = SampleUniform(scene.depth, 1000, Seed{s + 100});
    sparse = InjectOutliers(sparse, 0.2, {0.1, 0.7}, Seed{s + 200});
    const AlignmentParams fit =
        FitScaleShiftRobust(scene.guidance, sparse, CompletionConfig{}, Seed{s});
    recovered += std::abs(fit.scale - scene.scale) <= 0.01 * scene.scale &&
                 std::abs(fit.shift - scene.shift) <= 0.01 * std::max(std::abs(scene.shift), 0.1);
    for (const std::size_t i : fit.inliers) EXPECT_EQ(sparse[i], scene.depth[i]);
  }
  EXPECT_EQ(recovered, 20);
}

TEST(FitScaleShiftRobustTest, DegenerateGuidance) {
  CompletionConfig cfg;
  EXPECT_THROW(FitScaleShiftRobust(DepthMap::Filled(3, 1, 2.0), DepthMap(3, 1, {1, 2, 3}),
                                   cfg, Seed{1}),
               DegenerateFitError);
  EXPECT_THROW(FitScaleShiftRobust(DepthMap::Filled(3, 1, 2.0), DepthMap(3, 1, {1, 0, 0}),
                                   cfg, Seed{1}),
               std::invalid_argument);
}

// ---------------------------------------------------------------- kNN / IDW

TEST(KnnGridTest, MatchesBruteForce) {
  Rng rng(Seed{9});
  for (int trial = 0; trial < 20; ++trial) {
    const int w = static_cast<int>(rng.UniformInt(5, 90));
    const int h = static_cast<int>(rng.UniformInt(5, 70));
    const std::size_t n = rng.UniformInt(1, 200);
    std::vector<GridPoint> pts;
    std::vector<std::array<int, 2>> raw;
    for (std::size_t i = 0; i < n; ++i) {
      const int u = static_cast<int>(rng.UniformIndex(w));
      const int v = static_cast<int>(rng.UniformIndex(h));
      pts.push_back({u, v, 0.0});
      raw.push_back({u, v});
    }
    const KnnGrid grid(w, h, pts);
    std::vector<Neighbor> got;
    for (int q = 0; q < 50; ++q) {
      const int u = static_cast<int>(rng.UniformIndex(w));
      const int v = static_cast<int>(rng.UniformIndex(h));
      const std::size_t k = rng.UniformInt(1, 20);
      grid.Query(u, v, k, got);
      const auto expected = BruteKnn(raw, u, v, k);
      ASSERT_EQ(got.size(), expected.size());
      for (std::size_t j = 0; j < got.size(); ++j) ASSERT_EQ(got[j].index, expected[j]);
    }
  }
}

TEST(CompleteIdwTest, SinglePointGivesConstantMap) {
  DepthMap sparse(9, 7);
  sparse.set(4, 2, 3.25);
  const DepthMap out = CompleteIdw(sparse, CompletionConfig{});
  EXPECT_EQ(out, DepthMap::Filled(9, 7, 3.25));
}

TEST(CompleteIdwTest, EquidistantAverage) {
  DepthMap sparse(5, 1);
  sparse.set(0, 0, 1.0);
  sparse.set(4, 0, 3.0);
  CompletionConfig cfg;
  cfg.idw_k = 2;
  EXPECT_DOUBLE_EQ(CompleteIdw(sparse, cfg)(2, 0), 2.0);
}

TEST(CompleteIdwTest, DenseIsIdentityAndEmptyThrows) {
  Rng rng(Seed{3});
  const DepthMap dense = testing::RandomDepth(11, 8, rng, 0.5, 4.0);
  EXPECT_EQ(CompleteIdw(dense, CompletionConfig{}), dense);
  EXPECT_THROW(CompleteIdw(DepthMap(4, 4), CompletionConfig{}), std::invalid_argument);
}

// ---------------------------------------------------------------- guidance

TEST(CompleteWithGuidanceTest, ExactAffineGuidanceReproducesGt) {
  const SyntheticScene scene = MakeSyntheticScene(120, 90, Seed{5}, {.guidance_distortion = 0.0});
  for (const std::size_t n : {2u, 50u, 2000u}) {
    const DepthMap sparse = SampleUniform(scene.depth, n, Seed{n});
    const DepthMap out = CompleteWithGuidance(sparse, scene.guidance, CompletionConfig{}, Seed{1});
    for (std::size_t i = 0; i < out.size(); ++i) {
      ASSERT_NEAR(out[i], scene.depth[i], 1e-9) << "n=" << n << " pixel " << i;
    }
  }
}

TEST(CompleteWithGuidanceTest, InliersPreservedVerbatimAndOutputValid) {
  const SyntheticScene scene = MakeSyntheticScene(160, 120, Seed{6});
  DepthMap sparse = SampleUniform(scene.depth, 1500, Seed{7});
  sparse = InjectOutliers(sparse, 0.1, kDefaultOutlierFactors, Seed{8});
  CompletionConfig cfg;
  AlignmentParams fit;
  const DepthMap out = CompleteWithGuidance(sparse, scene.guidance, cfg, Seed{9}, &fit);
  ASSERT_FALSE(fit.inliers.empty());
  for (const std::size_t i : fit.inliers) ASSERT_EQ(out[i], sparse[i]);
  EXPECT_EQ(out.valid_count(), out.size());
  for (const double x : out.values()) {
    ASSERT_TRUE(std::isfinite(x));
    ASSERT_GE(x, cfg.min_depth_clamp);
  }
}

TEST(CompleteWithGuidanceTest, ResidualFieldIsBounded) {
  const SyntheticScene scene = MakeSyntheticScene(100, 80, Seed{10}, {.guidance_distortion = 0.05});
  const DepthMap sparse = SampleUniform(scene.depth, 400, Seed{11});
  CompletionConfig cfg;
  cfg.robust = false;
  AlignmentParams fit;
  const DepthMap out = CompleteWithGuidance(sparse, scene.guidance, cfg, Seed{1}, &fit);
  double lo = 1e300, hi = -1e300;
  for (const std::size_t i : fit.inliers) {
    const double r = sparse[i] - (fit.scale * scene.guidance[i] + fit.shift);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = out[i] - (fit.scale * scene.guidance[i] + fit.shift);
    ASSERT_GE(r, lo - 1e-12);
    ASSERT_LE(r, hi + 1e-12);
  }
}

TEST(CompleteWithGuidanceTest, AffineInvarianceOfGuidance) {
  const SyntheticScene scene = MakeSyntheticScene(100, 80, Seed{12});
  DepthMap sparse = SampleUniform(scene.depth, 800, Seed{13});
  sparse = InjectOutliers(sparse, 0.05, kDefaultOutlierFactors, Seed{14});
  for (const bool robust : {false, true}) {
    CompletionConfig cfg;
    cfg.robust = robust;
    const DepthMap a = CompleteWithGuidance(sparse, scene.guidance, cfg, Seed{15});
    const DepthMap b =
        CompleteWithGuidance(sparse, Affine(scene.guidance, 3.7, 0.9), cfg, Seed{15});
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-8) << i;
  }
}

TEST(CompleteWithGuidanceTest, RejectsSparseGuidance) {
  DepthMap guidance = DepthMap::Filled(4, 4, 1.0);
  guidance.invalidate(3);
  const DepthMap sparse = DepthMap::Filled(4, 4, 2.0);
  EXPECT_THROW(CompleteWithGuidance(sparse, guidance, CompletionConfig{}, Seed{1}),
               std::invalid_argument);
}

TEST(CompleteWithGuidanceTest, RobustOutliersStayBelowOnePercent) {
  const auto suite = testing::MakeSuite({.scenes = 3});
  EXPECT_LT(testing::SuiteAbsRel(suite, 2500, 0.10, CompletionConfig{}), 0.01);
}

// ---------------------------------------------------------------- iterate

TEST(IterateTest, SingleIterationEqualsCompletion) {
  const SyntheticScene scene = MakeSyntheticScene(64, 48, Seed{20});
  const DepthMap sparse = SampleUniform(scene.depth, 200, Seed{21});
  EXPECT_EQ(Iterate(sparse, scene.guidance, CompletionConfig{}, Seed{3}),
            CompleteWithGuidance(sparse, scene.guidance, CompletionConfig{}, Seed{3}));
}

TEST(IterateTest, ExactAffineIsFixedPoint) {
  const SyntheticScene scene = MakeSyntheticScene(64, 48, Seed{22}, {.guidance_distortion = 0.0});
  const DepthMap sparse = SampleUniform(scene.depth, 300, Seed{23});
  CompletionConfig one, two;
  two.refine_iters = 2;
  const DepthMap a = Iterate(sparse, scene.guidance, one, Seed{4});
  const DepthMap b = Iterate(sparse, scene.guidance, two, Seed{4});
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-9);
}

TEST(IterateTest, RefinementDoesNotDegradeSmoothScenes) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const SyntheticScene scene = MakeSyntheticScene(160, 120, Seed{30 + s});
    const DepthMap sparse = SampleUniform(scene.depth, 1000, Seed{40 + s});
    CompletionConfig one, three;
    three.refine_iters = 3;
    const double a = EvalPair(Iterate(sparse, scene.guidance, one, Seed{s}), scene.depth).absrel;
    const double c = EvalPair(Iterate(sparse, scene.guidance, three, Seed{s}), scene.depth).absrel;
    EXPECT_LE(c, a + 1e-6) << "scene " << s;
  }
}

// ------------------------------------------------------- suite statistics

TEST(CompletionSuiteTest, MonotoneInOutliersAndPointCount) {
  const auto suite = testing::MakeSuite();
  const CompletionConfig cfg;
  const double r0 = testing::SuiteAbsRel(suite, 2500, 0.0, cfg);
  const double r5 = testing::SuiteAbsRel(suite, 2500, 0.05, cfg);
  const double r10 = testing::SuiteAbsRel(suite, 2500, 0.10, cfg);
  EXPECT_LE(r0, r5);
  EXPECT_LE(r5, r10);
  const double n500 = testing::SuiteAbsRel(suite, 500, 0.0, cfg);
  const double n20000 = testing::SuiteAbsRel(suite, 20000, 0.0, cfg);
  EXPECT_GE(n500, r0);
  EXPECT_GE(r0, n20000);
  RecordProperty("absrel_ratio_0", std::to_string(r0));
  RecordProperty("absrel_ratio_10", std::to_string(r10));
}

TEST(CompletionConfigTest, Validation) {
  CompletionConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.idw_k = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = {};
  cfg.inlier_tol = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = {};
  cfg.refine_iters = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace depthkit
