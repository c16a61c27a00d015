#pragma once

#include <array>
#include <vector>

#include "depthkit/image.h"

namespace depthkit {

struct Keypoint {
  int u = 0;
  int v = 0;
  int score = 0;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

inline constexpr int kDefaultFastThreshold = 20;

// Offsets (du, dv) of the 16-pixel Bresenham circle of radius 3, clockwise
// starting at the top.
inline constexpr std::array<std::array<int, 2>, 16> kFastCircle = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

// FAST-9 segment test. A pixel at least 3 px from every border is a corner
// when some contiguous arc of >= 9 circle pixels is entirely brighter than
// I(p) + threshold or entirely darker than I(p) - threshold.
//
// Score: the largest sum of (|I(x) - I(p)| - threshold) over such an arc.
// With nms, a corner survives only if no 3x3 neighbour has a higher score or
// an equal score at a smaller row-major index. Output is in row-major order.
std::vector<Keypoint> DetectFast(const GrayImage& img, int threshold,
                                 bool nms);

// Per-pixel corner score image (0 for non-corners), row-major.
std::vector<int> FastScoreImage(const GrayImage& img, int threshold);

}  // namespace depthkit
