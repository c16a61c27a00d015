#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthkit/camera.h"
#include "depthkit/completion.h"
#include "depthkit/io.h"
#include "depthkit/metrics.h"
#include "depthkit/protocols.h"
#include "depthkit/sparsity.h"

namespace depthkit::bench {

// Where inputs live. Subdirectories are relative to `root`; files pair by stem.
struct DatasetConfig {
  std::filesystem::path root;
  std::string depth_dir = "depth";
  std::string rgb_dir = "rgb";
  std::string guidance_dir = "guidance";
  std::string noisy_dir = "noisy";
  DepthFormat depth_format = DepthFormat::kPng16;
  double depth_scale = kDefaultPng16Scale;
  DepthFormat guidance_format = DepthFormat::kPfm;
  double guidance_scale = 1.0;
  std::optional<std::filesystem::path> split;     // newline-delimited stems
  std::optional<std::filesystem::path> pred_dir;  // default <output_dir>/completed
  std::optional<CameraIntrinsics> intrinsics;
};

struct ProtocolSection {
  ProtocolKind kind = ProtocolKind::kSparseTof;
  ProtocolConfig params;
};

enum class CompletionMethod { kGuidance, kIdw, kNearest };

std::string_view ToString(CompletionMethod method);
CompletionMethod ParseCompletionMethod(std::string_view name);

struct CompletionSection {
  CompletionMethod method = CompletionMethod::kGuidance;
  CompletionConfig params;
};

struct MetricsSection {
  std::vector<double> taus = kDefaultTaus;
  std::size_t vn_triplets = 0;  // 0 disables the virtual-normal metric
};

struct OutputSection {
  DepthFormat format = DepthFormat::kPfm;
  double scale = 1.0;
};

enum class SweepAxis { kPoints, kOutlierRatio };

std::string_view ToString(SweepAxis axis);
SweepAxis ParseSweepAxis(std::string_view name);

struct SweepSection {
  SweepAxis axis = SweepAxis::kPoints;
  std::vector<double> grid;
  long long points = 2500;      // fixed count when sweeping outlier_ratio
  double outlier_ratio = 0.0;   // fixed ratio when sweeping points
};

struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "out";
  unsigned jobs = 0;  // 0 = all cores
  DatasetConfig dataset;
  std::optional<ProtocolSection> protocol;
  std::optional<SparsitySpec> sparsity;
  CompletionSection completion;
  MetricsSection metrics;
  OutputSection output;
  SweepSection sweep;

  // Structural checks only; directory existence is checked per command.
  void Validate() const;
};

// Relative paths in `j` are resolved against `base_dir`. Unknown keys throw.
ExperimentConfig ConfigFromJson(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);
nlohmann::json ToJson(const ExperimentConfig& cfg);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

nlohmann::json SparsitySpecToJson(const SparsitySpec& spec);
SparsitySpec SparsitySpecFromJson(const nlohmann::json& j);

}  // namespace depthkit::bench
