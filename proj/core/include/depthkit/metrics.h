#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "depthkit/camera.h"
#include "depthkit/depth_map.h"
#include "depthkit/random.h"

namespace depthkit {

// delta_1..delta_3 thresholds.
inline const std::vector<double> kDefaultTaus = {1.25, 1.25 * 1.25,
                                                 1.25 * 1.25 * 1.25};

struct MetricReport {
  double absrel = 0.0;
  double mae = 0.0;   // meters
  double rmse = 0.0;  // meters
  // (tau, fraction of evaluated pixels with max(p/g, g/p) < tau), in the order
  // the thresholds were requested.
  std::vector<std::pair<double, double>> delta;
  std::optional<double> vn_angle;  // mean radians
  std::size_t n_eval = 0;

  // Fraction for an exact tau value; throws std::out_of_range if absent.
  double delta_at(double tau) const;
};

struct VirtualNormalOptions {
  CameraIntrinsics intrinsics;
  std::size_t n_triplets = 1000;
  Seed seed{0};
};

// Evaluates over pixels where both gt and pred are valid. Throws
// std::invalid_argument on a dimension mismatch or empty evaluation set.
MetricReport EvalPair(const DepthMap& pred, const DepthMap& gt,
                      std::span<const double> taus = kDefaultTaus,
                      const std::optional<VirtualNormalOptions>& vn = std::nullopt);

// Triangles of jointly valid pixels accepted for the virtual-normal metric.
struct Triplet {
  std::size_t a, b, c;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// Mean angle in radians between virtual normals of pred and gt. Triplets are
// drawn from jointly valid pixels and kept only when the gt triangle has all
// sides >= 0.05 m and all angles in [15, 150] degrees; at most
// 10 * n_triplets draws are made. Angles are folded into [0, pi/2].
double VirtualNormalDivergence(const DepthMap& pred, const DepthMap& gt,
                               const CameraIntrinsics& k, std::size_t n_triplets,
                               Seed seed, std::vector<Triplet>* accepted = nullptr);

// Per-image-then-average mean of every metric; n_eval is summed. All reports
// must share the same thresholds. vn_angle is averaged when every report has
// one. Throws std::invalid_argument on an empty list.
MetricReport Aggregate(std::span<const MetricReport> reports);

}  // namespace depthkit
