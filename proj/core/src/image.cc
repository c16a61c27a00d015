#include "depthkit/image.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace depthkit {

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("GrayImage: negative size");
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> v)
    : width(w), height(h), values(std::move(v)) {
  if (w < 0 || h < 0 || values.size() != static_cast<std::size_t>(w) * h) {
    throw std::invalid_argument("GrayImage: value count does not match size");
  }
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("RgbImage: negative size");
  values.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

GrayImage ToGray(const RgbImage& rgb) {
  GrayImage gray(rgb.width, rgb.height);
  for (std::size_t i = 0; i < gray.values.size(); ++i) {
    const double luma = 0.299 * rgb.values[3 * i] +
                        0.587 * rgb.values[3 * i + 1] +
                        0.114 * rgb.values[3 * i + 2];
    gray.values[i] =
        static_cast<std::uint8_t>(std::clamp(std::round(luma), 0.0, 255.0));
  }
  return gray;
}

}  // namespace depthkit
