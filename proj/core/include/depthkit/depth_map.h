#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace depthkit {

// Dense H x W grid of metric depths in meters, row-major. A value of 0
// marks a pixel without a measurement. Values are always finite and >= 0.
//
// Storage is double precision so that alignment and completion results can
// be compared at sub-nanometer tolerances; file formats store 32-bit floats.
class DepthMap {
 public:
  // All pixels invalid.
  DepthMap(int width, int height);
  // Throws std::invalid_argument if any value is negative or non-finite or
  // the size does not match width * height.
  DepthMap(int width, int height, std::vector<double> values);

  static DepthMap Filled(int width, int height, double value);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  double operator()(int u, int v) const { return values_[index(u, v)]; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool valid(std::size_t i) const { return values_[i] > 0.0; }
  bool valid(int u, int v) const { return values_[index(u, v)] > 0.0; }

  // Throws std::invalid_argument on negative or non-finite values.
  void set(std::size_t i, double value);
  void set(int u, int v, double value) { set(index(u, v), value); }
  void invalidate(std::size_t i) { values_[i] = 0.0; }

  std::span<const double> values() const { return values_; }

  std::size_t valid_count() const;
  // Row-major indices of valid pixels, ascending.
  std::vector<std::size_t> valid_indices() const;

  bool same_shape(const DepthMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

// Throws std::invalid_argument unless a and b have equal dimensions.
void RequireSameShape(const DepthMap& a, const DepthMap& b, const char* what);

}  // namespace depthkit
