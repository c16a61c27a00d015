#include "depthkit/bench/config.h"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <stdexcept>

#include "depthkit/error.h"

namespace depthkit::bench {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, std::string_view section,
               std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument("config: '" + std::string(section) + "' must be an object");
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' in '" +
                                  std::string(section) + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void ReadRange(const json& j, const char* key, Range<T>& out) {
  if (!j.contains(key)) return;
  const json& r = j.at(key);
  if (!r.is_array() || r.size() != 2) {
    throw std::invalid_argument(std::string("config: '") + key + "' must be [min, max]");
  }
  out = {r[0].get<T>(), r[1].get<T>()};
}

template <typename T>
json RangeJson(const Range<T>& r) {
  return json::array({r.min, r.max});
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

CameraIntrinsics IntrinsicsFromJson(const json& j) {
  CheckKeys(j, "intrinsics", {"fx", "fy", "cx", "cy"});
  CameraIntrinsics k{j.at("fx").get<double>(), j.at("fy").get<double>(),
                     j.at("cx").get<double>(), j.at("cy").get<double>()};
  return k;
}

ProtocolSection ProtocolFromJson(const json& j) {
  CheckKeys(j, "protocol",
            {"kind", "border_fraction", "tof_stride", "tof_distant_percentile",
             "short_range_fraction", "noisy_inconsistency_tau"});
  ProtocolSection p;
  p.kind = ParseProtocolKind(j.at("kind").get<std::string>());
  Read(j, "border_fraction", p.params.border_fraction);
  Read(j, "tof_stride", p.params.tof_stride);
  Read(j, "tof_distant_percentile", p.params.tof_distant_percentile);
  Read(j, "short_range_fraction", p.params.short_range_fraction);
  Read(j, "noisy_inconsistency_tau", p.params.noisy_inconsistency_tau);
  return p;
}

json ProtocolToJson(const ProtocolSection& p) {
  return {{"kind", ToString(p.kind)},
          {"border_fraction", p.params.border_fraction},
          {"tof_stride", p.params.tof_stride},
          {"tof_distant_percentile", p.params.tof_distant_percentile},
          {"short_range_fraction", p.params.short_range_fraction},
          {"noisy_inconsistency_tau", p.params.noisy_inconsistency_tau}};
}

CompletionSection CompletionFromJson(const json& j) {
  CheckKeys(j, "completion",
            {"method", "robust", "ransac_iters", "inlier_tol", "idw_k", "idw_power",
             "min_depth_clamp", "refine_iters", "threads"});
  CompletionSection c;
  if (j.contains("method")) c.method = ParseCompletionMethod(j.at("method").get<std::string>());
  CompletionConfig& p = c.params;
  Read(j, "robust", p.robust);
  Read(j, "ransac_iters", p.ransac_iters);
  Read(j, "inlier_tol", p.inlier_tol);
  Read(j, "idw_k", p.idw_k);
  Read(j, "idw_power", p.idw_power);
  Read(j, "min_depth_clamp", p.min_depth_clamp);
  Read(j, "refine_iters", p.refine_iters);
  Read(j, "threads", p.threads);
  return c;
}

json CompletionToJson(const CompletionSection& c) {
  const CompletionConfig& p = c.params;
  return {{"method", ToString(c.method)},     {"robust", p.robust},
          {"ransac_iters", p.ransac_iters},   {"inlier_tol", p.inlier_tol},
          {"idw_k", p.idw_k},                 {"idw_power", p.idw_power},
          {"min_depth_clamp", p.min_depth_clamp}, {"refine_iters", p.refine_iters},
          {"threads", p.threads}};
}

}  // namespace

std::string_view ToString(CompletionMethod method) {
  switch (method) {
    case CompletionMethod::kGuidance: return "guidance";
    case CompletionMethod::kIdw: return "idw";
    case CompletionMethod::kNearest: return "nearest";
  }
  return "";
}

CompletionMethod ParseCompletionMethod(std::string_view name) {
  if (name == "guidance") return CompletionMethod::kGuidance;
  if (name == "idw") return CompletionMethod::kIdw;
  if (name == "nearest") return CompletionMethod::kNearest;
  throw std::invalid_argument("unknown completion method '" + std::string(name) +
                              "' (expected guidance, idw or nearest)");
}

std::string_view ToString(SweepAxis axis) {
  return axis == SweepAxis::kPoints ? "points" : "outlier_ratio";
}

SweepAxis ParseSweepAxis(std::string_view name) {
  if (name == "points") return SweepAxis::kPoints;
  if (name == "outlier_ratio") return SweepAxis::kOutlierRatio;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) +
                              "' (expected points or outlier_ratio)");
}

nlohmann::json SparsitySpecToJson(const SparsitySpec& spec) {
  json j = {{"kind", ToString(spec.kind)},
            {"point_count_range", RangeJson(spec.point_count_range)},
            {"fast_threshold_range", RangeJson(spec.fast_threshold_range)},
            {"polygon_vertex_range", RangeJson(spec.polygon_vertex_range)},
            {"polygon_area_fraction_range", RangeJson(spec.polygon_area_fraction_range)},
            {"distance_percentile_range", RangeJson(spec.distance_percentile_range)},
            {"outlier_ratio", spec.outlier_ratio},
            {"outlier_factor_range", RangeJson(spec.outlier_factor_range)}};
  if (!spec.children.empty()) {
    json children = json::array();
    for (const SparsitySpec& c : spec.children) children.push_back(SparsitySpecToJson(c));
    j["children"] = std::move(children);
  }
  return j;
}

SparsitySpec SparsitySpecFromJson(const nlohmann::json& j) {
  CheckKeys(j, "sparsity",
            {"kind", "point_count_range", "fast_threshold_range", "polygon_vertex_range",
             "polygon_area_fraction_range", "distance_percentile_range", "children",
             "outlier_ratio", "outlier_factor_range"});
  SparsitySpec spec;
  spec.kind = ParsePatternKind(j.at("kind").get<std::string>());
  ReadRange(j, "point_count_range", spec.point_count_range);
  ReadRange(j, "fast_threshold_range", spec.fast_threshold_range);
  ReadRange(j, "polygon_vertex_range", spec.polygon_vertex_range);
  ReadRange(j, "polygon_area_fraction_range", spec.polygon_area_fraction_range);
  ReadRange(j, "distance_percentile_range", spec.distance_percentile_range);
  ReadRange(j, "outlier_factor_range", spec.outlier_factor_range);
  Read(j, "outlier_ratio", spec.outlier_ratio);
  if (j.contains("children")) {
    for (const json& c : j.at("children")) spec.children.push_back(SparsitySpecFromJson(c));
  }
  return spec;
}

void ExperimentConfig::Validate() const {
  if (protocol && sparsity) {
    throw std::invalid_argument("config: 'protocol' and 'sparsity' are mutually exclusive");
  }
  if (protocol) protocol->params.Validate();
  if (sparsity) sparsity->Validate();
  completion.params.Validate();
  if (metrics.taus.empty()) throw std::invalid_argument("config: metrics.taus is empty");
  for (std::size_t i = 0; i < metrics.taus.size(); ++i) {
    if (!(metrics.taus[i] > 1.0) || (i > 0 && metrics.taus[i] <= metrics.taus[i - 1])) {
      throw std::invalid_argument("config: metrics.taus must be ascending and > 1");
    }
  }
  if (metrics.vn_triplets > 0 && !dataset.intrinsics) {
    throw std::invalid_argument("config: metrics.vn_triplets needs dataset.intrinsics");
  }
  if (dataset.intrinsics) dataset.intrinsics->Validate();
  if (!(dataset.depth_scale > 0.0) || !(dataset.guidance_scale > 0.0) || !(output.scale > 0.0)) {
    throw std::invalid_argument("config: depth scales must be positive");
  }
  for (std::size_t i = 1; i < sweep.grid.size(); ++i) {
    if (sweep.grid[i] <= sweep.grid[i - 1]) {
      throw std::invalid_argument("config: sweep.grid must be strictly ascending");
    }
  }
  if (sweep.points < 0 || !(sweep.outlier_ratio >= 0.0 && sweep.outlier_ratio <= 1.0)) {
    throw std::invalid_argument("config: sweep.points must be >= 0 and outlier_ratio in [0, 1]");
  }
}

ExperimentConfig ConfigFromJson(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  CheckKeys(j, "config", {"seed", "output_dir", "jobs", "dataset", "protocol", "sparsity",
                          "completion", "metrics", "output", "sweep"});
  ExperimentConfig cfg;
  if (j.contains("seed") && !j.at("seed").is_null()) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("output_dir")) {
    cfg.output_dir = Resolve(base_dir, j.at("output_dir").get<std::string>());
  } else {
    cfg.output_dir = Resolve(base_dir, cfg.output_dir);
  }
  Read(j, "jobs", cfg.jobs);

  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    CheckKeys(d, "dataset",
              {"root", "depth_dir", "rgb_dir", "guidance_dir", "noisy_dir", "depth_format",
               "depth_scale", "guidance_format", "guidance_scale", "split", "pred_dir",
               "intrinsics"});
    DatasetConfig& ds = cfg.dataset;
    ds.root = Resolve(base_dir, d.value("root", std::string(".")));
    Read(d, "depth_dir", ds.depth_dir);
    Read(d, "rgb_dir", ds.rgb_dir);
    Read(d, "guidance_dir", ds.guidance_dir);
    Read(d, "noisy_dir", ds.noisy_dir);
    if (d.contains("depth_format")) {
      ds.depth_format = ParseDepthFormat(d.at("depth_format").get<std::string>());
      if (ds.depth_format != DepthFormat::kPng16) ds.depth_scale = 1.0;
    }
    Read(d, "depth_scale", ds.depth_scale);
    if (d.contains("guidance_format")) {
      ds.guidance_format = ParseDepthFormat(d.at("guidance_format").get<std::string>());
    }
    Read(d, "guidance_scale", ds.guidance_scale);
    if (d.contains("split")) ds.split = Resolve(ds.root, d.at("split").get<std::string>());
    if (d.contains("pred_dir")) {
      ds.pred_dir = Resolve(base_dir, d.at("pred_dir").get<std::string>());
    }
    if (d.contains("intrinsics")) ds.intrinsics = IntrinsicsFromJson(d.at("intrinsics"));
  } else {
    cfg.dataset.root = base_dir;
  }

  if (j.contains("protocol")) cfg.protocol = ProtocolFromJson(j.at("protocol"));
  if (j.contains("sparsity")) cfg.sparsity = SparsitySpecFromJson(j.at("sparsity"));
  if (j.contains("completion")) cfg.completion = CompletionFromJson(j.at("completion"));

  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    CheckKeys(m, "metrics", {"taus", "vn_triplets"});
    Read(m, "taus", cfg.metrics.taus);
    Read(m, "vn_triplets", cfg.metrics.vn_triplets);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    CheckKeys(o, "output", {"format", "scale"});
    if (o.contains("format")) {
      cfg.output.format = ParseDepthFormat(o.at("format").get<std::string>());
      if (cfg.output.format == DepthFormat::kPng16) cfg.output.scale = kDefaultPng16Scale;
    }
    Read(o, "scale", cfg.output.scale);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    CheckKeys(s, "sweep", {"axis", "grid", "points", "outlier_ratio"});
    if (s.contains("axis")) cfg.sweep.axis = ParseSweepAxis(s.at("axis").get<std::string>());
    Read(s, "grid", cfg.sweep.grid);
    Read(s, "points", cfg.sweep.points);
    Read(s, "outlier_ratio", cfg.sweep.outlier_ratio);
  }
  cfg.Validate();
  return cfg;
}

nlohmann::json ToJson(const ExperimentConfig& cfg) {
  const DatasetConfig& ds = cfg.dataset;
  json dataset = {{"root", ds.root.string()},
                  {"depth_dir", ds.depth_dir},
                  {"rgb_dir", ds.rgb_dir},
                  {"guidance_dir", ds.guidance_dir},
                  {"noisy_dir", ds.noisy_dir},
                  {"depth_format", ToString(ds.depth_format)},
                  {"depth_scale", ds.depth_scale},
                  {"guidance_format", ToString(ds.guidance_format)},
                  {"guidance_scale", ds.guidance_scale}};
  if (ds.split) dataset["split"] = ds.split->string();
  if (ds.pred_dir) dataset["pred_dir"] = ds.pred_dir->string();
  if (ds.intrinsics) {
    const CameraIntrinsics& k = *ds.intrinsics;
    dataset["intrinsics"] = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
  }
  json j = {{"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
            {"output_dir", cfg.output_dir.string()},
            {"jobs", cfg.jobs},
            {"dataset", std::move(dataset)},
            {"completion", CompletionToJson(cfg.completion)},
            {"metrics", {{"taus", cfg.metrics.taus}, {"vn_triplets", cfg.metrics.vn_triplets}}},
            {"output", {{"format", ToString(cfg.output.format)}, {"scale", cfg.output.scale}}},
            {"sweep",
             {{"axis", ToString(cfg.sweep.axis)},
              {"grid", cfg.sweep.grid},
              {"points", cfg.sweep.points},
              {"outlier_ratio", cfg.sweep.outlier_ratio}}}};
  if (cfg.protocol) j["protocol"] = ProtocolToJson(*cfg.protocol);
  if (cfg.sparsity) j["sparsity"] = SparsitySpecToJson(*cfg.sparsity);
  return j;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace depthkit::bench
