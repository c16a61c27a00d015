#include "depthkit/io.h"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "depthkit/error.h"

namespace depthkit {
namespace fs = std::filesystem;

namespace {

// Largest pixel count accepted from any file header.
constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 28;

void CheckScale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("depth scale must be positive and finite");
  }
}

void CheckPixelCount(std::uint64_t width, std::uint64_t height,
                     const fs::path& path) {
  if (width == 0 || height == 0) {
    throw FormatError(path.string() + ": zero image dimension");
  }
  if (width > std::numeric_limits<int>::max() ||
      height > std::numeric_limits<int>::max() ||
      width * height > kMaxPixels) {
    throw FormatError(path.string() + ": dimension overflow");
  }
}

double ToMeters(double stored, double scale) {
  const double d = stored * scale;
  return std::isfinite(d) && d > 0.0 ? d : 0.0;
}

std::vector<unsigned char> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::uint32_t LoadU32(const unsigned char* p, bool little_endian) {
  if (little_endian) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
           std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
  }
  return std::uint32_t{p[3]} | std::uint32_t{p[2]} << 8 |
         std::uint32_t{p[1]} << 16 | std::uint32_t{p[0]} << 24;
}

void AppendU32LE(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

// ---------------------------------------------------------------- PFM

DepthMap LoadPfm(const fs::path& path, double scale) {
  const auto bytes = ReadFile(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
  };
  auto token = [&] {
    skip_space();
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) {
      t.push_back(static_cast<char>(bytes[pos++]));
    }
    if (t.empty()) throw FormatError(path.string() + ": truncated PFM header");
    return t;
  };

  const std::string magic = token();
  int channels = 0;
  if (magic == "Pf") {
    channels = 1;
  } else if (magic == "PF") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": bad PFM magic '" + magic + "'");
  }

  std::uint64_t width = 0, height = 0;
  double header_scale = 0.0;
  try {
    std::size_t used = 0;
    const std::string w = token(), h = token(), s = token();
    if (w.front() == '-' || h.front() == '-') throw std::invalid_argument("neg");
    width = std::stoull(w, &used);
    if (used != w.size()) throw std::invalid_argument("w");
    height = std::stoull(h, &used);
    if (used != h.size()) throw std::invalid_argument("h");
    header_scale = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("s");
  } catch (const std::logic_error&) {
    throw FormatError(path.string() + ": malformed PFM header");
  }
  if (header_scale == 0.0 || !std::isfinite(header_scale)) {
    throw FormatError(path.string() + ": PFM scale must be nonzero");
  }
  // Exactly one whitespace character separates the header from the data.
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw FormatError(path.string() + ": truncated PFM header");
  }
  ++pos;

  CheckPixelCount(width, height, path);
  const std::uint64_t need = width * height * channels * 4;
  if (bytes.size() - pos < need) {
    throw FormatError(path.string() + ": PFM payload too short");
  }

  const bool little = header_scale < 0.0;
  const int w = static_cast<int>(width), h = static_cast<int>(height);
  std::vector<double> values(width * height);
  for (int row = 0; row < h; ++row) {
    // PFM stores the bottom row first.
    const int v = h - 1 - row;
    for (int u = 0; u < w; ++u) {
      const std::size_t offset =
          pos + (static_cast<std::size_t>(row) * w + u) * channels * 4;
      const float f = std::bit_cast<float>(LoadU32(&bytes[offset], little));
      values[static_cast<std::size_t>(v) * w + u] = ToMeters(f, scale);
    }
  }
  return DepthMap(w, h, std::move(values));
}

void SavePfm(const DepthMap& depth, const fs::path& path, double scale) {
  std::string out = "Pf\n" + std::to_string(depth.width()) + " " +
                    std::to_string(depth.height()) + "\n-1.0\n";
  out.reserve(out.size() + depth.size() * 4);
  for (int v = depth.height() - 1; v >= 0; --v) {
    for (int u = 0; u < depth.width(); ++u) {
      const auto f = static_cast<float>(depth(u, v) / scale);
      AppendU32LE(out, std::bit_cast<std::uint32_t>(f));
    }
  }
  WriteFile(path, out);
}

// ---------------------------------------------------------------- rawf32

DepthMap LoadRawF32(const fs::path& path, double scale) {
  const auto bytes = ReadFile(path);
  if (bytes.size() < 8) throw FormatError(path.string() + ": truncated header");
  const std::uint64_t width = LoadU32(&bytes[0], true);
  const std::uint64_t height = LoadU32(&bytes[4], true);
  CheckPixelCount(width, height, path);
  if (bytes.size() - 8 != width * height * 4) {
    throw FormatError(path.string() + ": payload size does not match header");
  }
  std::vector<double> values(width * height);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = ToMeters(std::bit_cast<float>(LoadU32(&bytes[8 + 4 * i], true)),
                         scale);
  }
  return DepthMap(static_cast<int>(width), static_cast<int>(height),
                  std::move(values));
}

void SaveRawF32(const DepthMap& depth, const fs::path& path, double scale) {
  std::string out;
  out.reserve(8 + depth.size() * 4);
  AppendU32LE(out, static_cast<std::uint32_t>(depth.width()));
  AppendU32LE(out, static_cast<std::uint32_t>(depth.height()));
  for (const double d : depth.values()) {
    AppendU32LE(out, std::bit_cast<std::uint32_t>(static_cast<float>(d / scale)));
  }
  WriteFile(path, out);
}

// ---------------------------------------------------------------- PNG

struct PngError {
  std::jmp_buf jump;
  char message[256] = {};
};

void OnPngError(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof(err->message), "%s", msg);
  std::longjmp(err->jump, 1);
}

void OnPngWarning(png_structp, png_const_charp) {}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;   // after transforms
  int bit_depth = 0;  // after transforms
  std::vector<unsigned char> data;
};

enum class PngTarget { kGray16, kRgb8 };

struct PngReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadState() { png_destroy_read_struct(&png, &info, nullptr); }
};

// Only trivially destructible state and heap objects owned by pointers
// created before setjmp are touched after it.
void DecodePng(std::FILE* fp, PngTarget target, DecodedPng* out,
               PngError* err, PngReadState* st) {
  st->png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, OnPngError,
                                   OnPngWarning);
  if (!st->png) throw std::bad_alloc();
  st->info = png_create_info_struct(st->png);
  if (!st->info) throw std::bad_alloc();
  if (setjmp(err->jump)) {
    throw FormatError(std::string("PNG decode failed: ") + err->message);
  }
  png_init_io(st->png, fp);
  png_read_info(st->png, st->info);

  const png_uint_32 width = png_get_image_width(st->png, st->info);
  const png_uint_32 height = png_get_image_height(st->png, st->info);
  const int color = png_get_color_type(st->png, st->info);
  const int depth = png_get_bit_depth(st->png, st->info);

  if (target == PngTarget::kGray16) {
    if (color != PNG_COLOR_TYPE_GRAY || depth != 16) {
      throw FormatError("expected a 16-bit grayscale PNG");
    }
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(st->png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
      png_set_expand_gray_1_2_4_to_8(st->png);
    }
    if (depth == 16) png_set_strip_16(st->png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(st->png);
    }
    png_set_strip_alpha(st->png);
  }
  png_read_update_info(st->png, st->info);

  out->width = static_cast<int>(width);
  out->height = static_cast<int>(height);
  out->channels = png_get_channels(st->png, st->info);
  out->bit_depth = png_get_bit_depth(st->png, st->info);
  const std::size_t row_bytes = png_get_rowbytes(st->png, st->info);
  out->data.resize(row_bytes * height);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_read_row(st->png, out->data.data() + y * row_bytes, nullptr);
  }
  png_read_end(st->png, nullptr);
}

DecodedPng ReadPng(const fs::path& path, PngTarget target) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }
  std::rewind(fp.get());
  auto out = std::make_unique<DecodedPng>();
  auto err = std::make_unique<PngError>();
  auto st = std::make_unique<PngReadState>();
  try {
    DecodePng(fp.get(), target, out.get(), err.get(), st.get());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  CheckPixelCount(out->width, out->height, path);
  return std::move(*out);
}

struct PngWriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteState() { png_destroy_write_struct(&png, &info); }
};

void EncodePng(std::FILE* fp, int width, int height, int color_type,
               int bit_depth, const unsigned char* data, std::size_t row_bytes,
               PngError* err, PngWriteState* st) {
  st->png = png_create_write_struct(PNG_LIBPNG_VER_STRING, err, OnPngError,
                                    OnPngWarning);
  if (!st->png) throw std::bad_alloc();
  st->info = png_create_info_struct(st->png);
  if (!st->info) throw std::bad_alloc();
  if (setjmp(err->jump)) {
    throw IoError(std::string("PNG encode failed: ") + err->message);
  }
  png_init_io(st->png, fp);
  png_set_IHDR(st->png, st->info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(st->png, st->info);
  for (int y = 0; y < height; ++y) {
    png_write_row(st->png, data + static_cast<std::size_t>(y) * row_bytes);
  }
  png_write_end(st->png, nullptr);
}

void WritePng(const fs::path& path, int width, int height, int color_type,
              int bit_depth, const std::vector<unsigned char>& data) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open for writing: " + path.string());
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t row_bytes =
      static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  auto err = std::make_unique<PngError>();
  auto st = std::make_unique<PngWriteState>();
  EncodePng(fp.get(), width, height, color_type, bit_depth, data.data(),
            row_bytes, err.get(), st.get());
  if (std::fflush(fp.get()) != 0) throw IoError("write failed: " + path.string());
}

DepthMap LoadPng16(const fs::path& path, double scale) {
  const DecodedPng png = ReadPng(path, PngTarget::kGray16);
  std::vector<double> values(static_cast<std::size_t>(png.width) * png.height);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const unsigned stored = static_cast<unsigned>(png.data[2 * i]) << 8 |
                            png.data[2 * i + 1];
    values[i] = ToMeters(stored, scale);
  }
  return DepthMap(png.width, png.height, std::move(values));
}

void SavePng16(const DepthMap& depth, const fs::path& path, double scale) {
  std::vector<unsigned char> data(depth.size() * 2);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double q = std::round(depth[i] / scale);
    if (q > 65535.0) {
      throw std::out_of_range("png16: depth " + std::to_string(depth[i]) +
                              " m exceeds 16-bit range at scale " +
                              std::to_string(scale));
    }
    const auto stored = static_cast<unsigned>(q);
    data[2 * i] = static_cast<unsigned char>(stored >> 8);
    data[2 * i + 1] = static_cast<unsigned char>(stored & 0xff);
  }
  WritePng(path, depth.width(), depth.height(), PNG_COLOR_TYPE_GRAY, 16, data);
}

}  // namespace

DepthFormat ParseDepthFormat(std::string_view name) {
  if (name == "png16") return DepthFormat::kPng16;
  if (name == "pfm") return DepthFormat::kPfm;
  if (name == "rawf32") return DepthFormat::kRawF32;
  throw std::invalid_argument("unknown depth format '" + std::string(name) +
                              "' (expected png16, pfm or rawf32)");
}

std::string_view ToString(DepthFormat format) {
  switch (format) {
    case DepthFormat::kPng16: return "png16";
    case DepthFormat::kPfm: return "pfm";
    case DepthFormat::kRawF32: return "rawf32";
  }
  return "?";
}

std::string_view Extension(DepthFormat format) {
  switch (format) {
    case DepthFormat::kPng16: return ".png";
    case DepthFormat::kPfm: return ".pfm";
    case DepthFormat::kRawF32: return ".raw";
  }
  return "";
}

DepthMap LoadDepth(const fs::path& path, DepthFormat format, double scale) {
  CheckScale(scale);
  switch (format) {
    case DepthFormat::kPng16: return LoadPng16(path, scale);
    case DepthFormat::kPfm: return LoadPfm(path, scale);
    case DepthFormat::kRawF32: return LoadRawF32(path, scale);
  }
  throw std::invalid_argument("LoadDepth: bad format");
}

void SaveDepth(const DepthMap& depth, const fs::path& path, DepthFormat format,
               double scale) {
  CheckScale(scale);
  switch (format) {
    case DepthFormat::kPng16: return SavePng16(depth, path, scale);
    case DepthFormat::kPfm: return SavePfm(depth, path, scale);
    case DepthFormat::kRawF32: return SaveRawF32(depth, path, scale);
  }
  throw std::invalid_argument("SaveDepth: bad format");
}

RgbImage LoadRgb(const fs::path& path) {
  DecodedPng png = ReadPng(path, PngTarget::kRgb8);
  if (png.channels != 3 || png.bit_depth != 8) {
    throw FormatError(path.string() + ": unsupported PNG layout");
  }
  RgbImage img;
  img.width = png.width;
  img.height = png.height;
  img.values = std::move(png.data);
  return img;
}

void SaveRgb(const RgbImage& image, const fs::path& path) {
  if (image.values.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw std::invalid_argument("SaveRgb: value count does not match size");
  }
  WritePng(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 8, image.values);
}

}  // namespace depthkit
