#include "depthkit/bench/dataset.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "depthkit/error.h"

namespace depthkit::bench {
namespace fs = std::filesystem;

void RequireDir(const fs::path& dir, std::string_view what) {
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument(std::string(what) + " directory not found: " + dir.string());
  }
}

std::vector<std::string> ListImageIds(const DatasetConfig& ds) {
  const fs::path dir = ds.root / ds.depth_dir;
  RequireDir(dir, "depth");
  const std::string ext(Extension(ds.depth_format));
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      ids.push_back(entry.path().stem().string());
    }
  }
  if (ds.split) {
    std::ifstream in(*ds.split);
    if (!in) throw IoError("cannot open split list " + ds.split->string());
    std::set<std::string> wanted;
    std::string line;
    while (std::getline(in, line)) {
      line.erase(line.find_last_not_of(" \t\r") + 1);
      line.erase(0, line.find_first_not_of(" \t"));
      if (!line.empty()) wanted.insert(line);
    }
    std::erase_if(ids, [&](const std::string& id) { return !wanted.contains(id); });
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) throw std::invalid_argument("no images selected");
  return ids;
}

fs::path GtPath(const DatasetConfig& ds, const std::string& id) {
  return ds.root / ds.depth_dir / (id + std::string(Extension(ds.depth_format)));
}

fs::path RgbPath(const DatasetConfig& ds, const std::string& id) {
  return ds.root / ds.rgb_dir / (id + ".png");
}

fs::path GuidancePath(const DatasetConfig& ds, const std::string& id) {
  return ds.root / ds.guidance_dir / (id + std::string(Extension(ds.guidance_format)));
}

fs::path NoisyPath(const DatasetConfig& ds, const std::string& id) {
  return ds.root / ds.noisy_dir / (id + std::string(Extension(ds.depth_format)));
}

}  // namespace depthkit::bench
