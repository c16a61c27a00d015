#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "depthkit/depth_map.h"
#include "depthkit/fast.h"
#include "depthkit/image.h"
#include "depthkit/random.h"

namespace depthkit {

// ---------------------------------------------------------------------------
// Primitive pattern operations.

// Copies n gt pixels drawn uniformly without replacement from gt's valid set.
// Throws std::invalid_argument if n exceeds valid_count().
DepthMap SampleUniform(const DepthMap& gt, std::size_t n, Seed seed);

// Keeps gt values at FAST-9 corners (NMS on) where gt is valid. When there
// are more than max_points, the highest scores win (ties: row-major order).
DepthMap SampleFeatures(const DepthMap& gt, const GrayImage& img,
                        int threshold, std::size_t max_points);

enum class PolygonMode { kRemoveInside, kKeepInside };

// Pixel centres sit at integer (u, v). Inside follows the even-odd rule and
// points on the boundary count as inside.
DepthMap MaskPolygon(const DepthMap& d,
                     const std::vector<Eigen::Vector2d>& vertices,
                     PolygonMode mode);

// Row-major inside/outside flags for MaskPolygon's rasterization.
std::vector<bool> RasterizePolygon(int width, int height,
                                   const std::vector<Eigen::Vector2d>& vertices);

enum class DistanceMode { kPercentile, kAbsolute };

// Nearest-rank percentile of the valid values: sorted[ceil(p/100 * n) - 1].
// p in (0, 100]. Throws std::invalid_argument when there are no valid pixels.
double NearestRankPercentile(const DepthMap& d, double percentile);

// Zeros valid pixels deeper than the cutoff (percentile of valid depths or an
// absolute depth in meters).
DepthMap MaskDistance(const DepthMap& d, DistanceMode mode, double value);

inline constexpr std::pair<double, double> kDefaultOutlierFactors{0.1, 2.0};

// Multiplies round(ratio * valid_count) uniformly chosen valid depths by
// independent factors drawn uniformly from factor_range.
DepthMap InjectOutliers(const DepthMap& sparse, double ratio,
                        std::pair<double, double> factor_range, Seed seed);

// ---------------------------------------------------------------------------
// Declarative pattern synthesis.

enum class PatternKind {
  kUniform,
  kFeatures,
  kHolePolygon,
  kHoleDistance,
  kKeepPolygon,
  kComposite,
};

std::string_view ToString(PatternKind kind);
// Throws std::invalid_argument for unknown names.
PatternKind ParsePatternKind(std::string_view name);

template <typename T>
struct Range {
  T min{};
  T max{};

  friend bool operator==(const Range&, const Range&) = default;
};

struct SparsitySpec {
  PatternKind kind = PatternKind::kUniform;
  Range<long long> point_count_range{500, 500};
  Range<int> fast_threshold_range{kDefaultFastThreshold, kDefaultFastThreshold};
  Range<int> polygon_vertex_range{3, 8};
  Range<double> polygon_area_fraction_range{0.05, 0.3};
  Range<double> distance_percentile_range{50.0, 90.0};
  std::vector<SparsitySpec> children;
  double outlier_ratio = 0.0;
  Range<double> outlier_factor_range{kDefaultOutlierFactors.first,
                                     kDefaultOutlierFactors.second};

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
  bool NeedsImage() const;

  friend bool operator==(const SparsitySpec&, const SparsitySpec&) = default;
};

// Draws a simple polygon: vertex count uniform in vertex_range, vertices
// uniform over the image, ordered by angle around their centroid. Up to 64
// draws are made until the area fraction lands in area_range; otherwise the
// draw closest to the range is returned.
std::vector<Eigen::Vector2d> RandomPolygon(int width, int height,
                                           Range<int> vertex_range,
                                           Range<double> area_range, Rng& rng);

// Realizes a spec on one image. `img` is required iff the spec (or any child)
// samples features.
//
// Composite children run in order against a running result. Point kinds
// (uniform, features, nested composite) sample from gt and union into it;
// mask kinds filter it. The running result starts as gt when the first child
// is a mask and empty otherwise. Outliers are injected last.
DepthMap Synthesize(const DepthMap& gt, const GrayImage* img,
                    const SparsitySpec& spec, Seed seed);

}  // namespace depthkit
