#pragma once

#include <cstddef>
#include <vector>

#include "depthkit/depth_map.h"
#include "depthkit/random.h"

namespace depthkit {

// Affine map from guidance depth to metric depth: metric = scale * g + shift.
struct AlignmentParams {
  double scale = 1.0;
  double shift = 0.0;
  std::vector<std::size_t> inliers;  // row-major pixel indices, ascending
  double residual_rms = 0.0;         // meters, over the inliers
};

struct CompletionConfig {
  bool robust = true;
  int ransac_iters = 256;
  double inlier_tol = 0.05;  // relative residual |s*g + t - d| / d
  int idw_k = 16;
  double idw_power = 2.0;
  double min_depth_clamp = 0.001;
  int refine_iters = 1;
  unsigned threads = 0;  // interpolation workers, 0 = all cores

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
};

// Least-squares (s, t) over pixels valid in both maps, from the closed-form
// 2x2 normal equations. Throws std::invalid_argument for fewer than two
// joint-valid pixels and DegenerateFitError when the guidance is constant.
AlignmentParams FitScaleShift(const DepthMap& guidance, const DepthMap& sparse);

// RANSAC over two-point minimal samples followed by a least-squares refit of
// the largest consensus set (ties: lower RMS). Falls back to FitScaleShift
// when no hypothesis gathers two inliers.
AlignmentParams FitScaleShiftRobust(const DepthMap& guidance,
                                    const DepthMap& sparse,
                                    const CompletionConfig& cfg, Seed seed);

// Aligns the guidance to the sparse samples, then adds an IDW-interpolated
// residual field built from the inlier samples only. Inlier pixels carry the
// sparse value verbatim. Output is dense and >= cfg.min_depth_clamp.
DepthMap CompleteWithGuidance(const DepthMap& sparse, const DepthMap& guidance,
                              const CompletionConfig& cfg, Seed seed,
                              AlignmentParams* alignment = nullptr);

// No-guidance baseline: every invalid pixel gets the IDW combination of its
// idw_k nearest valid samples; valid pixels are kept.
DepthMap CompleteIdw(const DepthMap& sparse, const CompletionConfig& cfg);

// Runs CompleteWithGuidance refine_iters times, feeding each output back as
// the next guidance.
DepthMap Iterate(const DepthMap& sparse, const DepthMap& guidance,
                 const CompletionConfig& cfg, Seed seed);

}  // namespace depthkit
