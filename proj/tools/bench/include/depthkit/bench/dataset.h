#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "depthkit/bench/config.h"

namespace depthkit::bench {

// Stems of the ground-truth depth files, sorted, filtered by the split list
// when one is configured. Throws when nothing is selected.
std::vector<std::string> ListImageIds(const DatasetConfig& ds);

std::filesystem::path GtPath(const DatasetConfig& ds, const std::string& id);
std::filesystem::path RgbPath(const DatasetConfig& ds, const std::string& id);
std::filesystem::path GuidancePath(const DatasetConfig& ds, const std::string& id);
std::filesystem::path NoisyPath(const DatasetConfig& ds, const std::string& id);

// Throws std::invalid_argument naming the missing directory.
void RequireDir(const std::filesystem::path& dir, std::string_view what);

}  // namespace depthkit::bench
