#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "depthkit/metrics.h"
#include "support/oracles.h"

namespace depthkit {
namespace {

using testing::BruteEval;
using testing::RandomDepth;

TEST(EvalPairTest, IdenticalMaps) {
  Rng rng(Seed{1});
  const DepthMap gt = RandomDepth(10, 10, rng, 0.5, 5.0, 0.2);
  const MetricReport r = EvalPair(gt, gt);
  EXPECT_EQ(r.absrel, 0.0);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.delta_at(1.25), 1.0);
  EXPECT_EQ(r.n_eval, gt.valid_count());
  EXPECT_FALSE(r.vn_angle.has_value());
}

TEST(EvalPairTest, TwoPixelHandComputation) {
  const DepthMap gt(2, 1, {1.0, 2.0});
  const DepthMap pred(2, 1, {1.5, 2.0});
  const std::vector<double> taus = {1.25, 1.6};
  const MetricReport r = EvalPair(pred, gt, taus);
  EXPECT_DOUBLE_EQ(r.absrel, 0.25);
  EXPECT_DOUBLE_EQ(r.mae, 0.25);
  EXPECT_NEAR(r.rmse, std::sqrt(0.125), 1e-15);  // 0.35355...
  EXPECT_EQ(r.delta_at(1.25), 0.5);
  EXPECT_EQ(r.delta_at(1.6), 1.0);
}

TEST(EvalPairTest, UniformRatioTwoStrictInequality) {
  Rng rng(Seed{2});
  const DepthMap gt = RandomDepth(8, 8, rng, 0.5, 5.0);
  DepthMap pred(8, 8);
  for (std::size_t i = 0; i < gt.size(); ++i) pred.set(i, 2.0 * gt[i]);
  const std::vector<double> taus = {1.25 * 1.25 * 1.25, 2.0, 2.1};
  const MetricReport r = EvalPair(pred, gt, taus);
  EXPECT_EQ(r.delta_at(taus[0]), 0.0);
  EXPECT_EQ(r.delta_at(2.0), 0.0);
  EXPECT_EQ(r.delta_at(2.1), 1.0);
}

TEST(EvalPairTest, RatioExactlyTauIsNotCounted) {
  // 1.25 and 1/1.25 = 0.8 are exact in binary, so the ratio is exactly 1.25.
  const DepthMap gt(3, 1, {1.0, 1.25, 4.0});
  const DepthMap pred(3, 1, {1.25, 1.0, 5.0});
  const MetricReport r = EvalPair(pred, gt, kDefaultTaus);
  EXPECT_EQ(r.delta_at(1.25), 0.0);
  EXPECT_EQ(r.delta_at(1.25 * 1.25), 1.0);
}

TEST(EvalPairTest, EvaluatesOnlyJointlyValidPixels) {
  const DepthMap gt(4, 1, {1.0, 0.0, 2.0, 3.0});
  const DepthMap pred(4, 1, {1.0, 5.0, 0.0, 3.3});
  const MetricReport r = EvalPair(pred, gt);
  EXPECT_EQ(r.n_eval, 2u);
  EXPECT_NEAR(r.absrel, 0.05, 1e-15);
  EXPECT_THROW(EvalPair(DepthMap(2, 2), DepthMap::Filled(2, 2, 1.0)), std::invalid_argument);
  EXPECT_THROW(EvalPair(DepthMap(2, 2), DepthMap(2, 3)), std::invalid_argument);
}

// Scale consistency, power-mean inequality, delta monotonicity and agreement
// with the brute-force evaluator on random maps.
TEST(EvalPairTest, RandomPairProperties) {
  const std::vector<double> taus = {1.05, 1.1, 1.25, 1.5625, 1.953125};
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(Seed{s});
    const DepthMap gt = RandomDepth(8, 8, rng, 0.2, 10.0, 0.2);
    const DepthMap pred = RandomDepth(8, 8, rng, 0.2, 10.0, 0.2);
    if (EvalPair(pred, gt, taus).n_eval == 0) continue;
    const MetricReport r = EvalPair(pred, gt, taus);
    const auto o = BruteEval(pred, gt, taus);
    ASSERT_EQ(r.n_eval, o.n);
    EXPECT_NEAR(r.absrel, o.absrel, 1e-12 * o.absrel);
    EXPECT_NEAR(r.mae, o.mae, 1e-12 * o.mae);
    EXPECT_NEAR(r.rmse, o.rmse, 1e-12 * o.rmse);
    EXPECT_GE(r.rmse, r.mae);
    for (std::size_t t = 0; t < taus.size(); ++t) {
      EXPECT_EQ(r.delta[t].second, o.delta[t]);
      if (t > 0) EXPECT_LE(r.delta[t - 1].second, r.delta[t].second);
    }

    const double c = 0.5 + rng.Uniform01() * 4.0;
    DepthMap gc(8, 8), pc(8, 8);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      gc.set(i, c * gt[i]);
      pc.set(i, c * pred[i]);
    }
    const MetricReport rc = EvalPair(pc, gc, taus);
    EXPECT_NEAR(rc.absrel, r.absrel, 1e-12 * r.absrel);
    EXPECT_NEAR(rc.mae, c * r.mae, 1e-12 * c * r.mae);
    EXPECT_NEAR(rc.rmse, c * r.rmse, 1e-12 * c * r.rmse);
    for (std::size_t t = 0; t < taus.size(); ++t) {
      EXPECT_EQ(rc.delta[t].second, r.delta[t].second);
    }
  }
}

// ---------------------------------------------------------- virtual normal

struct PlaneFixture {
  DepthMap gt;
  DepthMap pred;
  CameraIntrinsics k;
};

// gt: fronto-parallel plane Z = z0. pred: the same plane rotated by theta
// about the camera x-axis through (0, 0, z0).
PlaneFixture TiltedPlane(double theta) {
  const int w = 128, h = 96;
  const double z0 = 2.0;
  PlaneFixture f{DepthMap::Filled(w, h, z0), DepthMap(w, h), {100, 100, 63.5, 47.5}};
  const double c = std::cos(theta), s = std::sin(theta);
  for (int v = 0; v < h; ++v) {
    const double y = (v - f.k.cy) / f.k.fy;
    for (int u = 0; u < w; ++u) f.pred.set(u, v, z0 * c / (c - s * y));
  }
  return f;
}

TEST(VirtualNormalTest, IdenticalMapsGiveZero) {
  const PlaneFixture f = TiltedPlane(0.3);
  EXPECT_EQ(VirtualNormalDivergence(f.pred, f.pred, f.k, 500, Seed{1}), 0.0);
  EXPECT_EQ(VirtualNormalDivergence(f.gt, f.gt, f.k, 500, Seed{1}), 0.0);
}

TEST(VirtualNormalTest, TiltedPlaneRecoversAngle) {
  for (const double deg : {5.0, 20.0, 45.0}) {
    const double theta = deg * std::numbers::pi / 180.0;
    const PlaneFixture f = TiltedPlane(theta);
    EXPECT_NEAR(VirtualNormalDivergence(f.pred, f.gt, f.k, 500, Seed{2}), theta, 1e-6) << deg;
  }
}

TEST(VirtualNormalTest, SeededTripletsReplay) {
  const PlaneFixture f = TiltedPlane(0.2);
  std::vector<Triplet> a, b;
  VirtualNormalDivergence(f.pred, f.gt, f.k, 200, Seed{3}, &a);
  VirtualNormalDivergence(f.pred, f.gt, f.k, 200, Seed{3}, &b);
  EXPECT_EQ(a.size(), 200u);
  EXPECT_EQ(a, b);
  for (const Triplet& t : a) {
    EXPECT_NE(t.a, t.b);
    EXPECT_NE(t.b, t.c);
    EXPECT_NE(t.a, t.c);
  }
}

TEST(VirtualNormalTest, Errors) {
  const CameraIntrinsics k{100, 100, 1, 1};
  DepthMap two(3, 3);
  two.set(0, 1.0);
  two.set(1, 1.0);
  EXPECT_THROW(VirtualNormalDivergence(two, two, k, 10, Seed{1}), std::invalid_argument);
  // Points closer than 5 cm never form an accepted triplet.
  const DepthMap tiny = DepthMap::Filled(3, 3, 0.01);
  EXPECT_THROW(VirtualNormalDivergence(tiny, tiny, k, 10, Seed{1}), std::invalid_argument);
  const PlaneFixture f = TiltedPlane(0.1);
  EXPECT_THROW(VirtualNormalDivergence(f.pred, f.gt, f.k, 0, Seed{1}), std::invalid_argument);
}

TEST(EvalPairTest, ComputesVirtualNormalWhenRequested) {
  const PlaneFixture f = TiltedPlane(0.25);
  const MetricReport r =
      EvalPair(f.pred, f.gt, kDefaultTaus, VirtualNormalOptions{f.k, 300, Seed{4}});
  ASSERT_TRUE(r.vn_angle.has_value());
  EXPECT_NEAR(*r.vn_angle, 0.25, 1e-6);
}

// ---------------------------------------------------------------- aggregate

MetricReport Report(double absrel, std::size_t n) {
  MetricReport r;
  r.absrel = absrel;
  r.mae = 2 * absrel;
  r.rmse = 3 * absrel;
  r.delta = {{1.25, 0.5}, {1.5625, 0.75}};
  r.vn_angle = 0.1;
  r.n_eval = n;
  return r;
}

TEST(AggregateTest, SingleReportIsItself) {
  const MetricReport r = Report(0.3, 7);
  const MetricReport a = Aggregate(std::vector<MetricReport>{r});
  EXPECT_EQ(a.absrel, r.absrel);
  EXPECT_EQ(a.mae, r.mae);
  EXPECT_EQ(a.rmse, r.rmse);
  EXPECT_EQ(a.delta, r.delta);
  EXPECT_EQ(a.vn_angle, r.vn_angle);
  EXPECT_EQ(a.n_eval, 7u);
}

TEST(AggregateTest, ArithmeticMeanAndClosure) {
  const MetricReport two = Aggregate(std::vector<MetricReport>{Report(0.1, 5), Report(0.3, 6)});
  EXPECT_NEAR(two.absrel, 0.2, 1e-15);
  EXPECT_EQ(two.n_eval, 11u);

  const std::vector<MetricReport> many(100, Report(0.17, 3));
  const MetricReport a = Aggregate(many);
  EXPECT_NEAR(a.absrel, 0.17, 1e-14);
  EXPECT_NEAR(a.rmse, 0.51, 1e-14);
  EXPECT_NEAR(a.delta[1].second, 0.75, 1e-14);
  EXPECT_EQ(a.n_eval, 300u);

  MetricReport no_vn = Report(0.1, 1);
  no_vn.vn_angle.reset();
  EXPECT_FALSE(Aggregate(std::vector<MetricReport>{no_vn, Report(0.1, 1)}).vn_angle);
  EXPECT_THROW(Aggregate(std::vector<MetricReport>{}), std::invalid_argument);
  MetricReport other = Report(0.1, 1);
  other.delta[0].first = 1.1;
  EXPECT_THROW(Aggregate(std::vector<MetricReport>{other, Report(0.1, 1)}),
               std::invalid_argument);
}

}  // namespace
}  // namespace depthkit
