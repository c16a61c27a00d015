#pragma once

#include <filesystem>
#include <string_view>

#include "depthkit/depth_map.h"
#include "depthkit/image.h"

namespace depthkit {

enum class DepthFormat {
  kPng16,   // 16-bit grayscale PNG, stored units * scale = meters
  kPfm,     // Portable Float Map, single channel ("Pf")
  kRawF32,  // u32 width, u32 height, then float32 values; all little-endian
};

// Accepts "png16", "pfm" or "rawf32". Throws std::invalid_argument.
DepthFormat ParseDepthFormat(std::string_view name);
std::string_view ToString(DepthFormat format);
// File extension including the dot: ".png", ".pfm", ".raw".
std::string_view Extension(DepthFormat format);

inline constexpr double kDefaultPng16Scale = 0.001;

// Loads a depth file; stored values are multiplied by `scale` to obtain
// meters. Non-finite or negative source values become 0 (invalid). PFM rows
// are returned top-to-bottom. Throws IoError or FormatError.
DepthMap LoadDepth(const std::filesystem::path& path, DepthFormat format,
                   double scale = 1.0);

// Writes a depth file with stored value = depth / scale. For png16 values are
// rounded to the nearest unit and an out-of-range value throws
// std::out_of_range. pfm and rawf32 store 32-bit floats, so the round trip is
// exact for float-representable depths.
void SaveDepth(const DepthMap& depth, const std::filesystem::path& path,
               DepthFormat format, double scale = 1.0);

// 8-bit PNG (gray, gray+alpha, RGB or RGBA). Throws IoError or FormatError.
RgbImage LoadRgb(const std::filesystem::path& path);
void SaveRgb(const RgbImage& image, const std::filesystem::path& path);

}  // namespace depthkit
