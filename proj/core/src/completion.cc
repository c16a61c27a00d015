#include "depthkit/completion.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "depthkit/error.h"
#include "depthkit/knn_grid.h"
#include "depthkit/parallel.h"

namespace depthkit {
namespace {

struct Sample {
  std::size_t index;
  double g;
  double d;
};

struct Line {
  double scale;
  double shift;
};

std::vector<Sample> JointSamples(const DepthMap& guidance, const DepthMap& sparse) {
  RequireSameShape(guidance, sparse, "scale/shift fit");
  std::vector<Sample> out;
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse.valid(i) && guidance.valid(i)) out.push_back({i, guidance[i], sparse[i]});
  }
  if (out.size() < 2) {
    throw std::invalid_argument(
        "scale/shift fit: need at least 2 pixels valid in both maps, got " +
        std::to_string(out.size()));
  }
  return out;
}

// Centered normal equations; nullopt when all guidance values are equal.
template <typename Pick>
std::optional<Line> LeastSquares(std::size_t n, Pick&& pick) {
  double g_min = std::numeric_limits<double>::infinity();
  double g_max = -g_min;
  double sum_g = 0.0, sum_d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Sample& s = pick(k);
    g_min = std::min(g_min, s.g);
    g_max = std::max(g_max, s.g);
    sum_g += s.g;
    sum_d += s.d;
  }
  if (!(g_min < g_max)) return std::nullopt;
  const double mean_g = sum_g / static_cast<double>(n);
  const double mean_d = sum_d / static_cast<double>(n);
  double sgg = 0.0, sgd = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Sample& s = pick(k);
    sgg += (s.g - mean_g) * (s.g - mean_g);
    sgd += (s.g - mean_g) * (s.d - mean_d);
  }
  if (!(sgg > 0.0)) return std::nullopt;
  const double scale = sgd / sgg;
  return Line{scale, mean_d - scale * mean_g};
}

template <typename Pick>
double Rms(const Line& line, std::size_t n, Pick&& pick) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Sample& s = pick(k);
    const double r = line.scale * s.g + line.shift - s.d;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

AlignmentParams FitAll(const std::vector<Sample>& samples) {
  auto pick = [&](std::size_t k) -> const Sample& { return samples[k]; };
  const auto line = LeastSquares(samples.size(), pick);
  if (!line) {
    throw DegenerateFitError(
        "scale/shift fit: guidance is constant over the sparse pixels");
  }
  AlignmentParams out{line->scale, line->shift, {}, Rms(*line, samples.size(), pick)};
  out.inliers.reserve(samples.size());
  for (const Sample& s : samples) out.inliers.push_back(s.index);
  return out;
}

void CheckGuidance(const DepthMap& sparse, const DepthMap& guidance) {
  RequireSameShape(sparse, guidance, "CompleteWithGuidance");
  if (guidance.valid_count() != guidance.size()) {
    throw std::invalid_argument("CompleteWithGuidance: guidance must be dense");
  }
}

// Fills every pixel for which `fixed` is unset with base + IDW(points).
template <typename Base>
void Densify(int width, int height, const KnnGrid& grid, const CompletionConfig& cfg,
             const std::vector<char>& fixed, Base&& base, std::vector<double>& out) {
  ParallelFor(static_cast<std::size_t>(height), cfg.threads, [&](std::size_t row) {
    std::vector<Neighbor> nbrs;
    const int v = static_cast<int>(row);
    for (int u = 0; u < width; ++u) {
      const std::size_t i = row * static_cast<std::size_t>(width) + u;
      if (fixed[i]) continue;
      grid.Query(u, v, static_cast<std::size_t>(cfg.idw_k), nbrs);
      const double value =
          base(i) + InverseDistanceWeight(nbrs, grid.points(), cfg.idw_power);
      out[i] = std::isfinite(value) ? std::max(value, cfg.min_depth_clamp)
                                    : cfg.min_depth_clamp;
    }
  });
}

}  // namespace

void CompletionConfig::Validate() const {
  if (ransac_iters < 1) throw std::invalid_argument("CompletionConfig: ransac_iters must be >= 1");
  if (!(inlier_tol > 0.0)) throw std::invalid_argument("CompletionConfig: inlier_tol must be > 0");
  if (idw_k < 1) throw std::invalid_argument("CompletionConfig: idw_k must be >= 1");
  if (!(idw_power >= 0.0) || !std::isfinite(idw_power)) {
    throw std::invalid_argument("CompletionConfig: idw_power must be >= 0");
  }
  if (!(min_depth_clamp > 0.0) || !std::isfinite(min_depth_clamp)) {
    throw std::invalid_argument("CompletionConfig: min_depth_clamp must be > 0");
  }
  if (refine_iters < 1) throw std::invalid_argument("CompletionConfig: refine_iters must be >= 1");
}

AlignmentParams FitScaleShift(const DepthMap& guidance, const DepthMap& sparse) {
  return FitAll(JointSamples(guidance, sparse));
}

AlignmentParams FitScaleShiftRobust(const DepthMap& guidance,
                                    const DepthMap& sparse,
                                    const CompletionConfig& cfg, Seed seed) {
  cfg.Validate();
  const std::vector<Sample> samples = JointSamples(guidance, sparse);
  const std::size_t n = samples.size();
  Rng rng(seed);

  std::vector<std::size_t> best, current;
  double best_rms = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.ransac_iters; ++it) {
    const std::size_t a = rng.UniformIndex(n);
    std::size_t b = rng.UniformIndex(n - 1);
    if (b >= a) ++b;
    const Sample& p = samples[a];
    const Sample& q = samples[b];
    if (p.g == q.g) continue;
    const double scale = (q.d - p.d) / (q.g - p.g);
    const Line line{scale, p.d - scale * p.g};

    current.clear();
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = line.scale * samples[k].g + line.shift - samples[k].d;
      if (std::abs(r) <= cfg.inlier_tol * samples[k].d) {
        current.push_back(k);
        sum_sq += r * r;
      }
    }
    const double rms = current.empty()
                           ? std::numeric_limits<double>::infinity()
                           : std::sqrt(sum_sq / static_cast<double>(current.size()));
    if (current.size() > best.size() ||
        (current.size() == best.size() && rms < best_rms)) {
      best.swap(current);
      best_rms = rms;
    }
  }
  if (best.size() < 2) return FitAll(samples);

  auto pick = [&](std::size_t k) -> const Sample& { return samples[best[k]]; };
  // The two hypothesis points have distinct guidance and zero residual, so
  // the consensus set is never degenerate.
  const Line line = *LeastSquares(best.size(), pick);
  AlignmentParams out{line.scale, line.shift, {}, Rms(line, best.size(), pick)};
  out.inliers.reserve(best.size());
  for (const std::size_t k : best) out.inliers.push_back(samples[k].index);
  return out;
}

DepthMap CompleteWithGuidance(const DepthMap& sparse, const DepthMap& guidance,
                              const CompletionConfig& cfg, Seed seed,
                              AlignmentParams* alignment) {
  cfg.Validate();
  CheckGuidance(sparse, guidance);
  AlignmentParams fit = cfg.robust ? FitScaleShiftRobust(guidance, sparse, cfg, seed)
                                   : FitScaleShift(guidance, sparse);
  if (!std::isfinite(fit.scale) || !std::isfinite(fit.shift)) {
    throw DegenerateFitError("CompleteWithGuidance: non-finite alignment");
  }

  const int w = sparse.width(), h = sparse.height();
  auto base = [&](std::size_t i) { return fit.scale * guidance[i] + fit.shift; };

  std::vector<GridPoint> residuals;
  residuals.reserve(fit.inliers.size());
  std::vector<char> fixed(sparse.size(), 0);
  std::vector<double> out(sparse.size(), 0.0);
  for (const std::size_t i : fit.inliers) {
    residuals.push_back({static_cast<int>(i % w), static_cast<int>(i / w),
                         sparse[i] - base(i)});
    fixed[i] = 1;
    out[i] = std::max(sparse[i], cfg.min_depth_clamp);
  }
  const KnnGrid grid(w, h, std::move(residuals));
  Densify(w, h, grid, cfg, fixed, base, out);
  if (alignment) *alignment = std::move(fit);
  return DepthMap(w, h, std::move(out));
}

DepthMap CompleteIdw(const DepthMap& sparse, const CompletionConfig& cfg) {
  cfg.Validate();
  const int w = sparse.width(), h = sparse.height();
  std::vector<GridPoint> points;
  std::vector<char> fixed(sparse.size(), 0);
  std::vector<double> out(sparse.size(), 0.0);
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (!sparse.valid(i)) continue;
    points.push_back({static_cast<int>(i % w), static_cast<int>(i / w), sparse[i]});
    fixed[i] = 1;
    out[i] = sparse[i];
  }
  if (points.empty()) throw std::invalid_argument("CompleteIdw: sparse map is empty");
  const KnnGrid grid(w, h, std::move(points));
  Densify(w, h, grid, cfg, fixed, [](std::size_t) { return 0.0; }, out);
  return DepthMap(w, h, std::move(out));
}

DepthMap Iterate(const DepthMap& sparse, const DepthMap& guidance,
                 const CompletionConfig& cfg, Seed seed) {
  cfg.Validate();
  DepthMap current = CompleteWithGuidance(sparse, guidance, cfg, seed);
  for (int it = 1; it < cfg.refine_iters; ++it) {
    current = CompleteWithGuidance(sparse, current, cfg, seed);
  }
  return current;
}

}  // namespace depthkit
