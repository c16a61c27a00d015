#pragma once

// Brute-force reference implementations used only by tests. None of these
// share code with the library paths they check.

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "depthkit/depth_map.h"
#include "depthkit/fast.h"
#include "depthkit/image.h"
#include "depthkit/random.h"

namespace depthkit::testing {

// FAST-9 by enumerating all 16 start positions and arc lengths 9..16 for both
// polarities. Score = max over qualifying arcs of sum(|I(x) - I(p)| - t).
std::vector<int> BruteFastScores(const GrayImage& img, int threshold);

// Keypoints from a score image, optionally with 3x3 NMS (ties: smaller index).
std::vector<Keypoint> BruteFastKeypoints(const GrayImage& img, int threshold,
                                         bool nms);

struct BruteMetrics {
  double absrel, mae, rmse;
  std::vector<double> delta;
  std::size_t n;
};

// Long-double accumulation over pixels valid in both maps.
BruteMetrics BruteEval(const DepthMap& pred, const DepthMap& gt,
                       const std::vector<double>& taus);

// Crossing-number point-in-polygon with boundary points counted inside.
bool PointInPolygon(const std::vector<Eigen::Vector2d>& poly, double x, double y);

// Exhaustive k nearest by (squared distance, index).
std::vector<std::size_t> BruteKnn(const std::vector<std::array<int, 2>>& pts,
                                  int u, int v, std::size_t k);

// Random depth map with values in [lo, hi] and roughly `invalid` fraction of
// zero pixels.
DepthMap RandomDepth(int w, int h, Rng& rng, double lo, double hi,
                     double invalid = 0.0);

GrayImage RandomGray(int w, int h, Rng& rng);

}  // namespace depthkit::testing
