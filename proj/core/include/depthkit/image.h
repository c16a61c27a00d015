#pragma once

#include <cstdint>
#include <vector>

namespace depthkit {

// 8-bit single channel image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);
  GrayImage(int w, int h, std::vector<std::uint8_t> v);

  std::uint8_t operator()(int u, int v) const {
    return values[static_cast<std::size_t>(v) * width + u];
  }
  std::uint8_t& operator()(int u, int v) {
    return values[static_cast<std::size_t>(v) * width + u];
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// 8-bit interleaved RGB image, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;  // size 3 * width * height

  RgbImage() = default;
  RgbImage(int w, int h);
};

// BT.601 luma: round(0.299 R + 0.587 G + 0.114 B), clamped to [0, 255].
GrayImage ToGray(const RgbImage& rgb);

}  // namespace depthkit
