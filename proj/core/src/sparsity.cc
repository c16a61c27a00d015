#include "depthkit/sparsity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace depthkit {
namespace {

constexpr double kBoundaryEps = 1e-9;
constexpr int kPolygonAttempts = 64;

// First n entries of `items` become a uniform sample without replacement.
void PartialShuffle(std::vector<std::size_t>& items, std::size_t n, Rng& rng) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.UniformIndex(items.size() - i);
    std::swap(items[i], items[j]);
  }
}

void MarkBoundary(int width, int height, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b, std::vector<bool>& inside) {
  auto mark = [&](long long u, long long v) {
    if (u >= 0 && v >= 0 && u < width && v < height) {
      inside[static_cast<std::size_t>(v) * width + u] = true;
    }
  };
  if (a.y() == b.y()) {
    if (a.y() != std::floor(a.y())) return;
    const long long v = static_cast<long long>(a.y());
    const double lo = std::max(std::min(a.x(), b.x()), -1.0);
    const double hi = std::min(std::max(a.x(), b.x()), static_cast<double>(width));
    for (long long u = static_cast<long long>(std::ceil(lo));
         u <= static_cast<long long>(std::floor(hi)); ++u) {
      mark(u, v);
    }
    return;
  }
  const double ylo = std::max(std::min(a.y(), b.y()), -1.0);
  const double yhi = std::min(std::max(a.y(), b.y()), static_cast<double>(height));
  for (long long v = static_cast<long long>(std::ceil(ylo));
       v <= static_cast<long long>(std::floor(yhi)); ++v) {
    const double x = a.x() + (v - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
    const double rx = std::round(x);
    if (std::abs(x - rx) <= kBoundaryEps) mark(static_cast<long long>(rx), v);
  }
}

double PolygonArea(const std::vector<Eigen::Vector2d>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) / 2.0;
}

bool IsMask(PatternKind kind) {
  return kind == PatternKind::kHolePolygon ||
         kind == PatternKind::kHoleDistance ||
         kind == PatternKind::kKeepPolygon;
}

template <typename T>
void CheckRange(const Range<T>& r, const char* name) {
  if (!(r.min <= r.max)) {
    throw std::invalid_argument(std::string("SparsitySpec: ") + name +
                                " must satisfy min <= max");
  }
}

DepthMap Union(const DepthMap& base, const DepthMap& points) {
  DepthMap out = base;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points.valid(i)) out.set(i, points[i]);
  }
  return out;
}

Seed ParameterSeed(Seed seed) { return Seed{SplitMix64(seed.value)}; }
Seed OutlierSeed(Seed seed) { return Seed{SplitMix64(~seed.value)}; }
Seed ChildSeed(Seed seed, std::size_t i) {
  return i == 0 ? seed : Seed{SplitMix64(seed.value + i)};
}

DepthMap Realize(const DepthMap& gt, const GrayImage* img,
                 const SparsitySpec& spec, Seed seed, const DepthMap& mask_base) {
  Rng params(ParameterSeed(seed));
  DepthMap result(gt.width(), gt.height());
  switch (spec.kind) {
    case PatternKind::kUniform: {
      const auto n = params.UniformInt(spec.point_count_range.min,
                                       spec.point_count_range.max);
      result = SampleUniform(gt, static_cast<std::size_t>(n), seed);
      break;
    }
    case PatternKind::kFeatures: {
      if (img == nullptr) {
        throw std::invalid_argument("Synthesize: features pattern needs an image");
      }
      const auto threshold = params.UniformInt(spec.fast_threshold_range.min,
                                               spec.fast_threshold_range.max);
      const auto max_points = params.UniformInt(spec.point_count_range.min,
                                                spec.point_count_range.max);
      result = SampleFeatures(gt, *img, static_cast<int>(threshold),
                              static_cast<std::size_t>(max_points));
      break;
    }
    case PatternKind::kHolePolygon:
    case PatternKind::kKeepPolygon: {
      Rng rng(seed);
      const auto poly = RandomPolygon(gt.width(), gt.height(),
                                      spec.polygon_vertex_range,
                                      spec.polygon_area_fraction_range, rng);
      result = MaskPolygon(mask_base, poly,
                           spec.kind == PatternKind::kHolePolygon
                               ? PolygonMode::kRemoveInside
                               : PolygonMode::kKeepInside);
      break;
    }
    case PatternKind::kHoleDistance: {
      const double p = params.UniformReal(spec.distance_percentile_range.min,
                                          spec.distance_percentile_range.max);
      result = MaskDistance(mask_base, DistanceMode::kPercentile, p);
      break;
    }
    case PatternKind::kComposite: {
      std::optional<DepthMap> running;
      for (std::size_t i = 0; i < spec.children.size(); ++i) {
        const SparsitySpec& child = spec.children[i];
        const Seed child_seed = ChildSeed(seed, i);
        if (IsMask(child.kind)) {
          running = Realize(gt, img, child, child_seed, running ? *running : gt);
        } else {
          DepthMap points = Realize(gt, img, child, child_seed, gt);
          running = running ? Union(*running, points) : std::move(points);
        }
      }
      result = std::move(*running);
      break;
    }
  }
  if (spec.outlier_ratio > 0.0) {
    result = InjectOutliers(
        result, spec.outlier_ratio,
        {spec.outlier_factor_range.min, spec.outlier_factor_range.max},
        OutlierSeed(seed));
  }
  return result;
}

}  // namespace

DepthMap SampleUniform(const DepthMap& gt, std::size_t n, Seed seed) {
  std::vector<std::size_t> valid = gt.valid_indices();
  if (n > valid.size()) {
    throw std::invalid_argument("SampleUniform: requested " + std::to_string(n) +
                                " points but only " +
                                std::to_string(valid.size()) + " are valid");
  }
  Rng rng(seed);
  PartialShuffle(valid, n, rng);
  DepthMap out(gt.width(), gt.height());
  for (std::size_t i = 0; i < n; ++i) out.set(valid[i], gt[valid[i]]);
  return out;
}

DepthMap SampleFeatures(const DepthMap& gt, const GrayImage& img,
                        int threshold, std::size_t max_points) {
  if (img.width != gt.width() || img.height != gt.height()) {
    throw std::invalid_argument("SampleFeatures: image and depth sizes differ");
  }
  std::vector<Keypoint> kps = DetectFast(img, threshold, /*nms=*/true);
  std::erase_if(kps, [&](const Keypoint& k) { return !gt.valid(k.u, k.v); });
  if (kps.size() > max_points) {
    std::stable_sort(kps.begin(), kps.end(),
                     [](const Keypoint& a, const Keypoint& b) {
                       return a.score > b.score;
                     });
    kps.resize(max_points);
  }
  DepthMap out(gt.width(), gt.height());
  for (const Keypoint& k : kps) out.set(k.u, k.v, gt(k.u, k.v));
  return out;
}

std::vector<bool> RasterizePolygon(int width, int height,
                                   const std::vector<Eigen::Vector2d>& vertices) {
  if (vertices.size() < 3) {
    throw std::invalid_argument("MaskPolygon: need at least 3 vertices");
  }
  std::vector<bool> inside(static_cast<std::size_t>(width) * height, false);
  const std::size_t n = vertices.size();
  std::vector<double> xs;
  for (int v = 0; v < height; ++v) {
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = vertices[i];
      const auto& b = vertices[(i + 1) % n];
      if ((a.y() <= v) != (b.y() <= v)) {
        xs.push_back(a.x() + (v - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double lo = std::max(std::ceil(xs[k]), 0.0);
      const double hi = std::min(std::floor(xs[k + 1]), width - 1.0);
      for (int u = static_cast<int>(lo); u <= static_cast<int>(hi); ++u) {
        inside[static_cast<std::size_t>(v) * width + u] = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    MarkBoundary(width, height, vertices[i], vertices[(i + 1) % n], inside);
  }
  return inside;
}

DepthMap MaskPolygon(const DepthMap& d,
                     const std::vector<Eigen::Vector2d>& vertices,
                     PolygonMode mode) {
  const std::vector<bool> inside = RasterizePolygon(d.width(), d.height(), vertices);
  const bool zero_inside = mode == PolygonMode::kRemoveInside;
  DepthMap out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (inside[i] == zero_inside) out.invalidate(i);
  }
  return out;
}

double NearestRankPercentile(const DepthMap& d, double percentile) {
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    throw std::invalid_argument("percentile must be in (0, 100]");
  }
  std::vector<double> valid;
  for (const double x : d.values()) {
    if (x > 0.0) valid.push_back(x);
  }
  if (valid.empty()) throw std::invalid_argument("percentile of an empty depth map");
  std::sort(valid.begin(), valid.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(percentile / 100.0 * static_cast<double>(valid.size())));
  return valid[std::clamp<std::size_t>(rank, 1, valid.size()) - 1];
}

DepthMap MaskDistance(const DepthMap& d, DistanceMode mode, double value) {
  double cutoff = value;
  if (mode == DistanceMode::kPercentile) {
    cutoff = NearestRankPercentile(d, value);
  } else if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("MaskDistance: absolute cutoff must be > 0");
  }
  DepthMap out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > cutoff) out.invalidate(i);
  }
  return out;
}

DepthMap InjectOutliers(const DepthMap& sparse, double ratio,
                        std::pair<double, double> factor_range, Seed seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("InjectOutliers: ratio must be in [0, 1]");
  }
  const auto [lo, hi] = factor_range;
  if (!(lo > 0.0) || !(lo <= hi) || !std::isfinite(hi)) {
    throw std::invalid_argument("InjectOutliers: factor range must be positive");
  }
  std::vector<std::size_t> valid = sparse.valid_indices();
  const auto count = static_cast<std::size_t>(
      std::round(ratio * static_cast<double>(valid.size())));
  Rng rng(seed);
  PartialShuffle(valid, count, rng);
  DepthMap out = sparse;
  for (std::size_t i = 0; i < count; ++i) {
    out.set(valid[i], sparse[valid[i]] * rng.UniformReal(lo, hi));
  }
  return out;
}

std::string_view ToString(PatternKind kind) {
  switch (kind) {
    case PatternKind::kUniform: return "uniform";
    case PatternKind::kFeatures: return "features";
    case PatternKind::kHolePolygon: return "hole_polygon";
    case PatternKind::kHoleDistance: return "hole_distance";
    case PatternKind::kKeepPolygon: return "keep_polygon";
    case PatternKind::kComposite: return "composite";
  }
  return "?";
}

PatternKind ParsePatternKind(std::string_view name) {
  for (const PatternKind k :
       {PatternKind::kUniform, PatternKind::kFeatures, PatternKind::kHolePolygon,
        PatternKind::kHoleDistance, PatternKind::kKeepPolygon,
        PatternKind::kComposite}) {
    if (ToString(k) == name) return k;
  }
  throw std::invalid_argument("unknown sparsity kind '" + std::string(name) + "'");
}

void SparsitySpec::Validate() const {
  CheckRange(point_count_range, "point_count_range");
  CheckRange(fast_threshold_range, "fast_threshold_range");
  CheckRange(polygon_vertex_range, "polygon_vertex_range");
  CheckRange(polygon_area_fraction_range, "polygon_area_fraction_range");
  CheckRange(distance_percentile_range, "distance_percentile_range");
  CheckRange(outlier_factor_range, "outlier_factor_range");
  if (point_count_range.min < 0) {
    throw std::invalid_argument("SparsitySpec: point counts must be >= 0");
  }
  if (fast_threshold_range.min < 0 || fast_threshold_range.max > 255) {
    throw std::invalid_argument("SparsitySpec: FAST thresholds must be in [0, 255]");
  }
  if (polygon_vertex_range.min < 3) {
    throw std::invalid_argument("SparsitySpec: polygons need >= 3 vertices");
  }
  if (!(polygon_area_fraction_range.min > 0.0 &&
        polygon_area_fraction_range.max < 1.0)) {
    throw std::invalid_argument("SparsitySpec: area fractions must lie in (0, 1)");
  }
  if (!(distance_percentile_range.min > 0.0 &&
        distance_percentile_range.max <= 100.0)) {
    throw std::invalid_argument("SparsitySpec: percentiles must lie in (0, 100]");
  }
  if (!(outlier_ratio >= 0.0 && outlier_ratio <= 1.0)) {
    throw std::invalid_argument("SparsitySpec: outlier_ratio must be in [0, 1]");
  }
  if (!(outlier_factor_range.min > 0.0)) {
    throw std::invalid_argument("SparsitySpec: outlier factors must be positive");
  }
  if (kind == PatternKind::kComposite) {
    if (children.empty()) {
      throw std::invalid_argument("SparsitySpec: composite needs >= 1 child");
    }
    for (const SparsitySpec& c : children) c.Validate();
  }
}

bool SparsitySpec::NeedsImage() const {
  if (kind == PatternKind::kFeatures) return true;
  return std::any_of(children.begin(), children.end(),
                     [](const SparsitySpec& c) { return c.NeedsImage(); });
}

std::vector<Eigen::Vector2d> RandomPolygon(int width, int height,
                                           Range<int> vertex_range,
                                           Range<double> area_range, Rng& rng) {
  if (vertex_range.min < 3 || vertex_range.max < vertex_range.min) {
    throw std::invalid_argument("RandomPolygon: bad vertex range");
  }
  const double image_area = static_cast<double>(width) * height;
  std::vector<Eigen::Vector2d> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < kPolygonAttempts; ++attempt) {
    const auto n = static_cast<std::size_t>(
        rng.UniformInt(vertex_range.min, vertex_range.max));
    std::vector<Eigen::Vector2d> pts(n);
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (auto& p : pts) {
      p = {rng.UniformReal(0.0, width - 1.0), rng.UniformReal(0.0, height - 1.0)};
      centroid += p;
    }
    centroid /= static_cast<double>(n);
    std::vector<double> angle(n);
    for (std::size_t i = 0; i < n; ++i) {
      angle[i] = std::atan2(pts[i].y() - centroid.y(), pts[i].x() - centroid.x());
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
    std::vector<Eigen::Vector2d> poly;
    poly.reserve(n);
    for (const std::size_t i : order) poly.push_back(pts[i]);

    const double fraction = PolygonArea(poly) / image_area;
    const double gap = fraction < area_range.min   ? area_range.min - fraction
                       : fraction > area_range.max ? fraction - area_range.max
                                                   : 0.0;
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(poly);
    }
    if (gap == 0.0) break;
  }
  return best;
}

DepthMap Synthesize(const DepthMap& gt, const GrayImage* img,
                    const SparsitySpec& spec, Seed seed) {
  spec.Validate();
  if (spec.NeedsImage() && img == nullptr) {
    throw std::invalid_argument("Synthesize: features pattern needs an image");
  }
  return Realize(gt, img, spec, seed, gt);
}

}  // namespace depthkit
