#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "depthkit/bench/config.h"

namespace depthkit::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;  // some images failed, the rest were written

struct RunResult {
  int exit_code = kExitOk;
  std::size_t processed = 0;
  std::vector<std::string> failed;  // image ids, sorted
  std::filesystem::path manifest;
};

// Configuration problems throw before any image is touched; per-image
// failures are logged to `log`, recorded in the manifest and reflected in the
// exit code.
RunResult CmdSynth(const ExperimentConfig& cfg, std::ostream& log);
RunResult CmdComplete(const ExperimentConfig& cfg, std::ostream& log);
RunResult CmdEval(const ExperimentConfig& cfg, std::ostream& log);
RunResult CmdSweep(const ExperimentConfig& cfg, std::ostream& log);

// File names under the output directory.
std::filesystem::path SparsePath(const ExperimentConfig& cfg, const std::string& id);
std::filesystem::path CompletedPath(const ExperimentConfig& cfg, const std::string& id);

struct SyntheticDatasetOptions {
  int count = 10;
  int width = 320;
  int height = 240;
  std::uint64_t seed = 0;
  double guidance_distortion = 0.02;
  DepthFormat format = DepthFormat::kPfm;
};

// Writes depth/, guidance/ and rgb/ plus a starter config.json under `root`.
void MakeSyntheticDataset(const std::filesystem::path& root,
                          const SyntheticDatasetOptions& options);

}  // namespace depthkit::bench
