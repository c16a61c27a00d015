#include "depthkit/fast.h"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>

namespace depthkit {
namespace {

constexpr int kArc = 9;

// True when the 16-bit circular mask has a run of at least kArc set bits.
bool HasArc(std::uint32_t mask16) {
  std::uint32_t run = mask16 | (mask16 << 16);
  std::uint32_t acc = run;
  for (int i = 1; i < kArc; ++i) acc &= run >> i;
  return acc != 0;
}

// Largest excess sum over maximal runs of length >= kArc in the mask.
int BestArcScore(std::uint32_t mask16, const std::array<int, 16>& excess) {
  if (mask16 == 0xffff) {
    int total = 0;
    for (const int e : excess) total += e;
    return total;
  }
  // Start scanning right after a clear bit so no run wraps past the origin.
  const int start = std::countr_one(mask16);
  int best = 0, len = 0, sum = 0;
  for (int step = 1; step <= 16; ++step) {
    const int i = (start + step) % 16;
    if (mask16 >> i & 1u) {
      ++len;
      sum += excess[i];
    } else {
      if (len >= kArc && sum > best) best = sum;
      len = 0;
      sum = 0;
    }
  }
  if (len >= kArc && sum > best) best = sum;
  return best;
}

}  // namespace

std::vector<int> FastScoreImage(const GrayImage& img, int threshold) {
  if (threshold < 0) throw std::invalid_argument("DetectFast: negative threshold");
  const int w = img.width, h = img.height;
  std::vector<int> scores(static_cast<std::size_t>(w) * h, 0);
  if (w < 7 || h < 7) return scores;

  std::array<int, 16> offsets;
  for (int k = 0; k < 16; ++k) {
    offsets[k] = kFastCircle[k][1] * w + kFastCircle[k][0];
  }

  const std::uint8_t* data = img.values.data();
  for (int v = 3; v < h - 3; ++v) {
    for (int u = 3; u < w - 3; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * w + u;
      const std::uint8_t* p = data + idx;
      const int center = *p;
      const int hi = center + threshold;
      const int lo = center - threshold;

      // Any 9 consecutive circle pixels include at least two of the four
      // compass points.
      int bright_compass = 0, dark_compass = 0;
      for (int k = 0; k < 16; k += 4) {
        const int x = p[offsets[k]];
        bright_compass += x > hi;
        dark_compass += x < lo;
      }
      if (bright_compass < 2 && dark_compass < 2) continue;

      std::uint32_t bright = 0, dark = 0;
      std::array<int, 16> excess;
      for (int k = 0; k < 16; ++k) {
        const int x = p[offsets[k]];
        if (x > hi) bright |= 1u << k;
        if (x < lo) dark |= 1u << k;
        excess[k] = std::abs(x - center) - threshold;
      }
      int score = 0;
      if (HasArc(bright)) score = BestArcScore(bright, excess);
      if (HasArc(dark)) score = std::max(score, BestArcScore(dark, excess));
      scores[idx] = score;
    }
  }
  return scores;
}

std::vector<Keypoint> DetectFast(const GrayImage& img, int threshold,
                                 bool nms) {
  const std::vector<int> scores = FastScoreImage(img, threshold);
  const int w = img.width, h = img.height;
  std::vector<Keypoint> out;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * w + u;
      const int s = scores[idx];
      if (s <= 0) continue;
      bool keep = true;
      if (nms) {
        for (int dv = -1; dv <= 1 && keep; ++dv) {
          for (int du = -1; du <= 1; ++du) {
            if (du == 0 && dv == 0) continue;
            const int nu = u + du, nv = v + dv;
            if (nu < 0 || nv < 0 || nu >= w || nv >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(nv) * w + nu;
            const int ns = scores[nidx];
            if (ns > s || (ns == s && nidx < idx)) {
              keep = false;
              break;
            }
          }
        }
      }
      if (keep) out.push_back({u, v, s});
    }
  }
  return out;
}

}  // namespace depthkit
