#include "depthkit/protocols.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "depthkit/sparsity.h"

namespace depthkit {

void ProtocolConfig::Validate() const {
  auto fraction_ok = [](double f) { return f > 0.0 && f < 1.0; };
  if (!fraction_ok(border_fraction)) {
    throw std::invalid_argument("ProtocolConfig: border_fraction must be in (0, 1)");
  }
  if (tof_stride < 2) {
    throw std::invalid_argument("ProtocolConfig: tof_stride must be >= 2");
  }
  if (!(tof_distant_percentile > 0.0 && tof_distant_percentile <= 100.0)) {
    throw std::invalid_argument(
        "ProtocolConfig: tof_distant_percentile must be in (0, 100]");
  }
  if (!fraction_ok(short_range_fraction)) {
    throw std::invalid_argument(
        "ProtocolConfig: short_range_fraction must be in (0, 1)");
  }
  if (!(noisy_inconsistency_tau > 0.0) || !std::isfinite(noisy_inconsistency_tau)) {
    throw std::invalid_argument(
        "ProtocolConfig: noisy_inconsistency_tau must be positive");
  }
}

std::string_view ToString(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kUnpairedFov: return "unpaired_fov";
    case ProtocolKind::kSparseTof: return "sparse_tof";
    case ProtocolKind::kShortRange: return "short_range";
    case ProtocolKind::kNoisy: return "noisy";
  }
  return "?";
}

ProtocolKind ParseProtocolKind(std::string_view name) {
  for (const ProtocolKind k : {ProtocolKind::kUnpairedFov, ProtocolKind::kSparseTof,
                               ProtocolKind::kShortRange, ProtocolKind::kNoisy}) {
    if (ToString(k) == name) return k;
  }
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

int BorderBand(double fraction, int n) {
  return static_cast<int>(std::floor(fraction * n + 0.5));
}

DepthMap GenUnpairedFov(const DepthMap& gt, const ProtocolConfig& cfg) {
  if (!(cfg.border_fraction >= 0.0 && cfg.border_fraction < 1.0)) {
    throw std::invalid_argument("GenUnpairedFov: border_fraction must be in [0, 1)");
  }
  const int w = gt.width(), h = gt.height();
  const int band_v = BorderBand(cfg.border_fraction, h);
  const int band_u = BorderBand(cfg.border_fraction, w);
  if (2 * band_v >= h || 2 * band_u >= w) {
    throw std::invalid_argument("GenUnpairedFov: image too small for the border bands");
  }
  DepthMap out = gt;
  for (int v = 0; v < h; ++v) {
    const bool row_masked = v < band_v || v >= h - band_v;
    for (int u = 0; u < w; ++u) {
      if (row_masked || u < band_u || u >= w - band_u) out.invalidate(out.index(u, v));
    }
  }
  return out;
}

DepthMap GenSparseTof(const DepthMap& gt, const ProtocolConfig& cfg) {
  if (cfg.tof_stride < 2) {
    throw std::invalid_argument("GenSparseTof: tof_stride must be >= 2");
  }
  DepthMap lattice(gt.width(), gt.height());
  for (int v = 0; v < gt.height(); v += cfg.tof_stride) {
    for (int u = 0; u < gt.width(); u += cfg.tof_stride) {
      lattice.set(u, v, gt(u, v));
    }
  }
  if (lattice.valid_count() == 0) return lattice;
  return MaskDistance(lattice, DistanceMode::kPercentile, cfg.tof_distant_percentile);
}

DepthMap GenShortRange(const DepthMap& gt, const ProtocolConfig& cfg) {
  const double f = cfg.short_range_fraction;
  if (!(f >= 0.0 && f <= 1.0)) {
    throw std::invalid_argument("GenShortRange: fraction must be in [0, 1]");
  }
  std::vector<std::size_t> valid = gt.valid_indices();
  if (valid.empty()) throw std::invalid_argument("GenShortRange: no valid pixels");
  const auto remove = static_cast<std::size_t>(
      std::floor(f * static_cast<double>(valid.size())));
  std::partial_sort(valid.begin(), valid.begin() + static_cast<std::ptrdiff_t>(remove),
                    valid.end(), [&](std::size_t a, std::size_t b) {
                      return gt[a] != gt[b] ? gt[a] > gt[b] : a > b;
                    });
  DepthMap out = gt;
  for (std::size_t i = 0; i < remove; ++i) out.invalidate(valid[i]);
  return out;
}

DepthMap GenNoisy(const DepthMap& gt, const DepthMap& noisy,
                  const ProtocolConfig& cfg) {
  RequireSameShape(gt, noisy, "GenNoisy");
  DepthMap out(gt.width(), gt.height());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.valid(i) || !noisy.valid(i)) continue;
    if (std::abs(noisy[i] - gt[i]) / gt[i] <= cfg.noisy_inconsistency_tau) {
      out.set(i, noisy[i]);
    }
  }
  return out;
}

}  // namespace depthkit
