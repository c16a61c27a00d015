#include "depthkit/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace depthkit {
namespace {

constexpr double kMinSceneDepth = 0.5;
constexpr int kTextureCell = 16;

struct Bump {
  double x, y, sigma, amplitude;
};

}  // namespace

SyntheticScene MakeSyntheticScene(int width, int height, Seed seed,
                                  const SyntheticOptions& options) {
  Rng rng(seed);
  const double z0 = rng.UniformReal(2.0, 4.0);
  const double tilt_x = rng.UniformReal(-1.0, 1.0);
  const double tilt_y = rng.UniformReal(-1.0, 1.0);
  std::vector<Bump> bumps(static_cast<std::size_t>(std::max(options.bumps, 0)));
  for (Bump& b : bumps) {
    b = {rng.UniformReal(0.0, 1.0), rng.UniformReal(0.0, 1.0),
         rng.UniformReal(0.08, 0.25), rng.UniformReal(-0.6, 0.6)};
  }
  const double freq_x = rng.UniformReal(0.5, 1.5);
  const double freq_y = rng.UniformReal(0.5, 1.5);
  const double phase_x = rng.UniformReal(0.0, 1.0);
  const double phase_y = rng.UniformReal(0.0, 1.0);

  SyntheticScene scene{DepthMap(width, height), DepthMap(width, height),
                       RgbImage(width, height),
                       CameraIntrinsics{0.8 * width, 0.8 * width, (width - 1) / 2.0,
                                        (height - 1) / 2.0},
                       rng.UniformReal(0.5, 3.0), rng.UniformReal(-0.4, 0.4)};

  const int cols = (width + kTextureCell - 1) / kTextureCell;
  const int rows = (height + kTextureCell - 1) / kTextureCell;
  std::vector<std::array<int, 3>> palette(static_cast<std::size_t>(cols) * rows);
  for (auto& c : palette) {
    for (int& ch : c) ch = static_cast<int>(rng.UniformInt(30, 225));
  }

  const double two_pi = 2.0 * std::numbers::pi;
  for (int v = 0; v < height; ++v) {
    const double y = (v + 0.5) / height;
    for (int u = 0; u < width; ++u) {
      const double x = (u + 0.5) / width;
      double z = z0 + tilt_x * (x - 0.5) + tilt_y * (y - 0.5);
      for (const Bump& b : bumps) {
        const double r2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
        z += b.amplitude * std::exp(-r2 / (2.0 * b.sigma * b.sigma));
      }
      z = std::max(z, kMinSceneDepth);
      scene.depth.set(u, v, z);

      const double warp = options.guidance_distortion *
                          std::sin(two_pi * (freq_x * x + phase_x)) *
                          std::cos(two_pi * (freq_y * y + phase_y));
      scene.guidance.set(u, v, (z * (1.0 + warp) - scene.shift) / scene.scale);

      const auto& color =
          palette[static_cast<std::size_t>(v / kTextureCell) * cols + u / kTextureCell];
      const double shade = std::clamp(1.3 - 0.15 * z, 0.4, 1.0);
      for (int ch = 0; ch < 3; ++ch) {
        scene.rgb.values[(static_cast<std::size_t>(v) * width + u) * 3 + ch] =
            static_cast<std::uint8_t>(std::lround(color[ch] * shade));
      }
    }
  }
  return scene;
}

}  // namespace depthkit
