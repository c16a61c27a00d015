#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>

#include "depthkit/camera.h"
#include "depthkit/depth_map.h"
#include "depthkit/error.h"
#include "depthkit/image.h"
#include "depthkit/io.h"
#include "depthkit/random.h"
#include "support/oracles.h"
#include "support/temp_dir.h"

namespace depthkit {
namespace {

namespace fs = std::filesystem;

TEST(DepthMapTest, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(DepthMap(2, 1, {1.0, -0.5}), std::invalid_argument);
  EXPECT_THROW(DepthMap(2, 1, {1.0, std::numeric_limits<double>::quiet_NaN()}),
               std::invalid_argument);
  EXPECT_THROW(DepthMap(1, 1, {std::numeric_limits<double>::infinity()}),
               std::invalid_argument);
  EXPECT_THROW(DepthMap(0, 3), std::invalid_argument);
  EXPECT_THROW(DepthMap(2, 2, {1.0}), std::invalid_argument);

  DepthMap d(2, 2);
  EXPECT_THROW(d.set(0, -1.0), std::invalid_argument);
}

TEST(DepthMapTest, ValidCountCountsStrictlyPositive) {
  const DepthMap d(3, 1, {0.0, 1e-30, 2.0});
  EXPECT_EQ(d.valid_count(), 2u);
  EXPECT_EQ(d.valid_indices(), (std::vector<std::size_t>{1, 2}));
}

TEST(ToGrayTest, Bt601Luma) {
  RgbImage rgb(3, 1);
  rgb.values = {255, 255, 255, 255, 0, 0, 0, 0, 0};
  const GrayImage g = ToGray(rgb);
  EXPECT_EQ(g.values[0], 255);
  EXPECT_EQ(g.values[1], 76);  // round(0.299 * 255) = round(76.245)
  EXPECT_EQ(g.values[2], 0);
}

TEST(UnprojectTest, PinholeModel) {
  const CameraIntrinsics principal{500, 500, 10, 20};
  DepthMap d(30, 30);
  d.set(10, 20, 2.0);
  const Eigen::Vector3d p = Unproject(d, principal, 10, 20);
  EXPECT_EQ(p, Eigen::Vector3d(0, 0, 2));

  const CameraIntrinsics k{100, 100, 0, 0};
  DepthMap e(101, 1);
  e.set(100, 0, 1.0);
  const Eigen::Vector3d q = Unproject(e, k, 100, 0);
  EXPECT_DOUBLE_EQ(q.x(), 1.0);
  EXPECT_DOUBLE_EQ(q.y(), 0.0);
  EXPECT_DOUBLE_EQ(q.z(), 1.0);

  EXPECT_THROW(Unproject(e, k, 0, 0), std::invalid_argument);
  EXPECT_THROW((CameraIntrinsics{0, 1, 0, 0}.Validate()), std::invalid_argument);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(Seed{42}), b(Seed{42});
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.UniformIndex(1000), b.UniformIndex(1000));
    EXPECT_EQ(a.Uniform01(), b.Uniform01());
  }
}

TEST(RngTest, UniformIndexStaysInRange) {
  Rng rng(Seed{1});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto x = rng.UniformIndex(7);
    ASSERT_LT(x, 7u);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(rng.UniformInt(5, 5), 5);
  EXPECT_EQ(rng.UniformReal(2.0, 2.0), 2.0);
}

TEST(RngTest, Hash64DependsOnSeedAndId) {
  EXPECT_EQ(Hash64(Seed{1}, "img_0001"), Hash64(Seed{1}, "img_0001"));
  EXPECT_NE(Hash64(Seed{1}, "img_0001"), Hash64(Seed{2}, "img_0001"));
  EXPECT_NE(Hash64(Seed{1}, "img_0001"), Hash64(Seed{1}, "img_0002"));
}

class DepthIoTest : public ::testing::Test {
 protected:
  testing::TempDir dir_;
};

TEST_F(DepthIoTest, Png16AllZerosIsAllInvalid) {
  const fs::path p = dir_.path() / "zeros.png";
  SaveDepth(DepthMap(4, 3), p, DepthFormat::kPng16, 0.001);
  const DepthMap d = LoadDepth(p, DepthFormat::kPng16, 0.001);
  EXPECT_EQ(d.width(), 4);
  EXPECT_EQ(d.height(), 3);
  EXPECT_EQ(d.valid_count(), 0u);
}

TEST_F(DepthIoTest, Png16UnitConversion) {
  const fs::path p = dir_.path() / "one.png";
  // Stored unit 1000 at 1 mm per unit.
  SaveDepth(DepthMap(1, 1, {1000.0}), p, DepthFormat::kPng16, 1.0);
  const DepthMap d = LoadDepth(p, DepthFormat::kPng16, 0.001);
  EXPECT_DOUBLE_EQ(d[0], 1.0);
}

TEST_F(DepthIoTest, Png16Overflow) {
  const fs::path p = dir_.path() / "big.png";
  EXPECT_THROW(SaveDepth(DepthMap(1, 1, {65.536}), p, DepthFormat::kPng16, 0.001),
               std::out_of_range);
  EXPECT_NO_THROW(SaveDepth(DepthMap(1, 1, {65.535}), p, DepthFormat::kPng16, 0.001));
}

TEST_F(DepthIoTest, Png16QuantizesWithinOneStep) {
  const fs::path p = dir_.path() / "q.png";
  SaveDepth(DepthMap(1, 1, {1.2345}), p, DepthFormat::kPng16, 0.001);
  const double back = LoadDepth(p, DepthFormat::kPng16, 0.001)[0];
  EXPECT_TRUE(std::abs(back - 1.234) < 1e-12 || std::abs(back - 1.235) < 1e-12) << back;
}

TEST_F(DepthIoTest, PfmRoundTripIsBitIdentical) {
  const DepthMap d(3, 2, {0.5, 1.25, 0.0, 3.0, 7.75, 100.0});
  const fs::path p = dir_.path() / "d.pfm";
  SaveDepth(d, p, DepthFormat::kPfm);
  EXPECT_EQ(LoadDepth(p, DepthFormat::kPfm), d);
}

// Property: pfm and rawf32 are lossless for float-representable maps, png16
// is within one quantization step.
TEST_F(DepthIoTest, RoundTripProperty) {
  Rng rng(Seed{7});
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng.UniformIndex(17));
    const int h = 1 + static_cast<int>(rng.UniformIndex(13));
    DepthMap d(w, h);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (rng.Uniform01() < 0.2) continue;
      d.set(i, static_cast<float>(rng.UniformReal(0.01, 60.0)));
    }
    for (const auto fmt : {DepthFormat::kPfm, DepthFormat::kRawF32}) {
      const fs::path p = dir_.path() / ("rt" + std::string(Extension(fmt)));
      SaveDepth(d, p, fmt, 1.0);
      ASSERT_EQ(LoadDepth(p, fmt, 1.0), d) << ToString(fmt);
    }
    const fs::path p = dir_.path() / "rt.png";
    SaveDepth(d, p, DepthFormat::kPng16, 0.001);
    const DepthMap q = LoadDepth(p, DepthFormat::kPng16, 0.001);
    for (std::size_t i = 0; i < d.size(); ++i) {
      ASSERT_LE(std::abs(q[i] - d[i]), 0.001) << i;
    }
  }
}

TEST_F(DepthIoTest, PfmBigEndianAndRowOrder) {
  // 1x2 map, big-endian (positive scale), bottom row stored first.
  const fs::path p = dir_.path() / "be.pfm";
  std::string bytes = "Pf\n1 2\n1.0\n";
  for (const float f : {2.0f, 1.0f}) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<char>(bits >> s));
  }
  std::ofstream(p, std::ios::binary) << bytes;
  const DepthMap d = LoadDepth(p, DepthFormat::kPfm);
  EXPECT_EQ(d(0, 0), 1.0);
  EXPECT_EQ(d(0, 1), 2.0);
}

TEST_F(DepthIoTest, NonFiniteAndNegativeBecomeInvalid) {
  const fs::path p = dir_.path() / "bad.raw";
  std::string bytes;
  auto u32 = [&](std::uint32_t x) {
    for (int s = 0; s < 32; s += 8) bytes.push_back(static_cast<char>(x >> s));
  };
  u32(3);
  u32(1);
  u32(std::bit_cast<std::uint32_t>(-1.0f));
  u32(std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN()));
  u32(std::bit_cast<std::uint32_t>(4.0f));
  std::ofstream(p, std::ios::binary) << bytes;
  const DepthMap d = LoadDepth(p, DepthFormat::kRawF32, 0.5);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_EQ(d[2], 2.0);
}

TEST_F(DepthIoTest, MalformedFilesThrow) {
  const fs::path p = dir_.path() / "junk.pfm";
  std::ofstream(p, std::ios::binary) << "P5\n1 1\n255\n";
  EXPECT_THROW(LoadDepth(p, DepthFormat::kPfm), FormatError);
  EXPECT_THROW(LoadDepth(p, DepthFormat::kPng16), FormatError);

  const fs::path trunc = dir_.path() / "trunc.pfm";
  std::ofstream(trunc, std::ios::binary) << "Pf\n4 4\n-1.0\nabc";
  EXPECT_THROW(LoadDepth(trunc, DepthFormat::kPfm), FormatError);

  const fs::path huge = dir_.path() / "huge.pfm";
  std::ofstream(huge, std::ios::binary) << "Pf\n4000000000 4000000000\n-1.0\n";
  EXPECT_THROW(LoadDepth(huge, DepthFormat::kPfm), FormatError);

  const fs::path raw = dir_.path() / "short.raw";
  std::ofstream(raw, std::ios::binary) << std::string("\x02\0\0\0\x02\0\0\0", 8);
  EXPECT_THROW(LoadDepth(raw, DepthFormat::kRawF32), FormatError);

  EXPECT_THROW(LoadDepth(dir_.path() / "missing.pfm", DepthFormat::kPfm), IoError);
  EXPECT_THROW(ParseDepthFormat("exr"), std::invalid_argument);
}

TEST_F(DepthIoTest, RgbPngRoundTrip) {
  RgbImage img(5, 4);
  Rng rng(Seed{3});
  for (auto& v : img.values) v = static_cast<std::uint8_t>(rng.UniformIndex(256));
  const fs::path p = dir_.path() / "rgb.png";
  SaveRgb(img, p);
  const RgbImage back = LoadRgb(p);
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 4);
  EXPECT_EQ(back.values, img.values);
}

}  // namespace
}  // namespace depthkit
