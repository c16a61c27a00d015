#pragma once

#include <string_view>

#include "depthkit/depth_map.h"

namespace depthkit {

// Parameters of the benchmark degradations. All generators are deterministic.
struct ProtocolConfig {
  double border_fraction = 0.125;         // per-side band, fraction of H or W
  int tof_stride = 3;                     // lattice pitch in pixels
  double tof_distant_percentile = 90.0;   // nearest-rank, of lattice depths
  double short_range_fraction = 0.5;      // fraction of valid pixels removed
  double noisy_inconsistency_tau = 0.2;   // max |noisy - gt| / gt kept

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
};

enum class ProtocolKind { kUnpairedFov, kSparseTof, kShortRange, kNoisy };

std::string_view ToString(ProtocolKind kind);
// Accepts "unpaired_fov", "sparse_tof", "short_range" or "noisy".
ProtocolKind ParseProtocolKind(std::string_view name);

// Number of rows/columns in each border band: round-half-up(fraction * n).
int BorderBand(double fraction, int n);

// Zeros a band of BorderBand(border_fraction, H) rows at the top and bottom
// and the corresponding columns at left and right.
DepthMap GenUnpairedFov(const DepthMap& gt, const ProtocolConfig& cfg);

// Keeps gt on the lattice u % stride == 0, v % stride == 0, then zeros lattice
// depths above the nearest-rank tof_distant_percentile of the kept depths.
DepthMap GenSparseTof(const DepthMap& gt, const ProtocolConfig& cfg);

// Zeros the floor(f * valid_count) deepest valid pixels; among equal depths
// the larger row-major index goes first.
DepthMap GenShortRange(const DepthMap& gt, const ProtocolConfig& cfg);

// Keeps the noisy value where both maps are valid and
// |noisy - gt| / gt <= noisy_inconsistency_tau.
DepthMap GenNoisy(const DepthMap& gt, const DepthMap& noisy,
                  const ProtocolConfig& cfg);

}  // namespace depthkit
