#include "depthkit/depth_map.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace depthkit {
namespace {

void CheckDimensions(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("DepthMap: dimensions must be positive, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
}

void CheckValue(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("DepthMap: depth must be finite and >= 0");
  }
}

}  // namespace

DepthMap::DepthMap(int width, int height) : width_(width), height_(height) {
  CheckDimensions(width, height);
  values_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

DepthMap::DepthMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  CheckDimensions(width, height);
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("DepthMap: value count does not match size");
  }
  std::for_each(values_.begin(), values_.end(), CheckValue);
}

DepthMap DepthMap::Filled(int width, int height, double value) {
  CheckValue(value);
  return DepthMap(width, height,
                  std::vector<double>(static_cast<std::size_t>(width) * height,
                                      value));
}

void DepthMap::set(std::size_t i, double value) {
  CheckValue(value);
  values_.at(i) = value;
}

std::size_t DepthMap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(
      values_.begin(), values_.end(), [](double d) { return d > 0.0; }));
}

std::vector<std::size_t> DepthMap::valid_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 0.0) out.push_back(i);
  }
  return out;
}

void RequireSameShape(const DepthMap& a, const DepthMap& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.width()) + "x" +
                                std::to_string(a.height()) + " vs " +
                                std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
  }
}

}  // namespace depthkit
