#include "depthkit/bench/commands.h"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "depthkit/bench/dataset.h"
#include "depthkit/bench/report.h"
#include "depthkit/error.h"
#include "depthkit/image.h"
#include "depthkit/parallel.h"
#include "depthkit/synthetic.h"

#ifndef DEPTHKIT_VERSION
#define DEPTHKIT_VERSION "unknown"
#endif

namespace depthkit::bench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Seed RequireSeed(const ExperimentConfig& cfg, std::string_view command) {
  if (!cfg.seed) {
    throw std::invalid_argument(std::string(command) +
                                " is stochastic and needs a seed (--seed or config 'seed')");
  }
  return Seed{*cfg.seed};
}

unsigned ResolveJobs(const ExperimentConfig& cfg, std::size_t n) {
  const unsigned jobs = cfg.jobs == 0 ? DefaultJobs() : cfg.jobs;
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(jobs, n)));
}

// Image-level workers already saturate the cores; keep each completion serial.
CompletionConfig PerImageCompletion(const ExperimentConfig& cfg, unsigned jobs) {
  CompletionConfig p = cfg.completion.params;
  if (jobs > 1 && p.threads == 0) p.threads = 1;
  return p;
}

void WriteText(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

json ReportJson(const MetricReport& r) {
  json delta = json::array();
  for (const auto& [tau, frac] : r.delta) delta.push_back({{"tau", tau}, {"fraction", frac}});
  json j = {{"absrel", r.absrel}, {"mae", r.mae},       {"rmse", r.rmse},
            {"delta", delta},     {"n_eval", r.n_eval}};
  if (r.vn_angle) j["vn_angle"] = *r.vn_angle;
  return j;
}

// One image's worth of work, filled by a worker and read by the single writer.
struct Outcome {
  json record = json::object();
  std::vector<fs::path> files;
  std::optional<MetricReport> report;
  std::string error;
};

template <typename Fn>
std::vector<Outcome> RunPerImage(const std::vector<std::string>& ids, unsigned jobs, Fn&& fn) {
  std::vector<Outcome> outcomes(ids.size());
  ParallelFor(ids.size(), jobs, [&](std::size_t i) {
    Outcome& o = outcomes[i];
    o.record["id"] = ids[i];
    try {
      fn(i, o);
    } catch (const std::exception& e) {
      o.error = e.what();
      o.report.reset();
      o.record["error"] = o.error;
    }
  });
  return outcomes;
}

std::string Relative(const ExperimentConfig& cfg, const fs::path& p) {
  return p.lexically_relative(cfg.output_dir).generic_string();
}

RunResult WriteManifest(const ExperimentConfig& cfg, std::string_view command,
                        const std::vector<std::string>& ids, const std::vector<Outcome>& outcomes,
                        json records, std::vector<fs::path> files, std::ostream& log,
                        json extra = json::object()) {
  RunResult result;
  result.processed = ids.size();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (const fs::path& f : outcomes[i].files) files.push_back(f);
    if (!outcomes[i].error.empty()) {
      result.failed.push_back(ids[i]);
      log << fmt::format("warning: {}: {}\n", ids[i], outcomes[i].error);
    }
  }
  std::vector<std::string> listed;
  for (const fs::path& f : files) listed.push_back(Relative(cfg, f));
  std::sort(listed.begin(), listed.end());

  json manifest = {{"toolkit", "depthkit"},
                   {"version", DEPTHKIT_VERSION},
                   {"command", command},
                   {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                   {"config", ToJson(cfg)},
                   {"records", std::move(records)},
                   {"failed", result.failed},
                   {"files", listed}};
  manifest.update(extra);
  result.manifest = cfg.output_dir / fmt::format("manifest_{}.json", command);
  WriteText(result.manifest, manifest.dump(2) + "\n");
  result.exit_code = result.failed.empty() ? kExitOk : kExitPartial;
  return result;
}

json CollectRecords(const std::vector<Outcome>& outcomes) {
  json records = json::array();
  for (const Outcome& o : outcomes) records.push_back(o.record);
  return records;
}

bool UsesSparsity(const ExperimentConfig& cfg) { return !cfg.protocol.has_value(); }

SparsitySpec EffectiveSpec(const ExperimentConfig& cfg) {
  return cfg.sparsity ? *cfg.sparsity : SparsitySpec{};
}

DepthMap MakeSparse(const ExperimentConfig& cfg, const SparsitySpec& spec, const DepthMap& gt,
                    const std::string& id, Seed seed) {
  const DatasetConfig& ds = cfg.dataset;
  if (cfg.protocol) {
    const ProtocolConfig& p = cfg.protocol->params;
    switch (cfg.protocol->kind) {
      case ProtocolKind::kUnpairedFov: return GenUnpairedFov(gt, p);
      case ProtocolKind::kSparseTof: return GenSparseTof(gt, p);
      case ProtocolKind::kShortRange: return GenShortRange(gt, p);
      case ProtocolKind::kNoisy:
        return GenNoisy(gt, LoadDepth(NoisyPath(ds, id), ds.depth_format, ds.depth_scale), p);
    }
  }
  if (spec.NeedsImage()) {
    const GrayImage img = ToGray(LoadRgb(RgbPath(ds, id)));
    return Synthesize(gt, &img, spec, seed);
  }
  return Synthesize(gt, nullptr, spec, seed);
}

bool CompletionIsStochastic(const ExperimentConfig& cfg) {
  return cfg.completion.method == CompletionMethod::kGuidance && cfg.completion.params.robust;
}

DepthMap Complete(const ExperimentConfig& cfg, const CompletionConfig& params,
                  const DepthMap& sparse, const std::string& id, Seed seed, json* record) {
  switch (cfg.completion.method) {
    case CompletionMethod::kIdw: return CompleteIdw(sparse, params);
    case CompletionMethod::kNearest: {
      CompletionConfig nearest = params;
      nearest.idw_k = 1;
      return CompleteIdw(sparse, nearest);
    }
    case CompletionMethod::kGuidance: break;
  }
  const DatasetConfig& ds = cfg.dataset;
  const DepthMap guidance = LoadDepth(GuidancePath(ds, id), ds.guidance_format, ds.guidance_scale);
  if (params.refine_iters > 1) return Iterate(sparse, guidance, params, seed);
  AlignmentParams fit;
  DepthMap out = CompleteWithGuidance(sparse, guidance, params, seed, &fit);
  if (record) {
    (*record)["alignment"] = {{"scale", fit.scale},
                              {"shift", fit.shift},
                              {"inliers", fit.inliers.size()},
                              {"residual_rms", fit.residual_rms}};
  }
  return out;
}

void CheckCompletionInputs(const ExperimentConfig& cfg) {
  if (cfg.completion.method == CompletionMethod::kGuidance) {
    RequireDir(cfg.dataset.root / cfg.dataset.guidance_dir, "guidance");
  }
}

fs::path PredictionPath(const ExperimentConfig& cfg, const std::string& id) {
  if (!cfg.dataset.pred_dir) return CompletedPath(cfg, id);
  const std::string ext(Extension(cfg.output.format));
  const fs::path suffixed = *cfg.dataset.pred_dir / (id + "_completed" + ext);
  if (fs::exists(suffixed)) return suffixed;
  return *cfg.dataset.pred_dir / (id + ext);
}

std::optional<VirtualNormalOptions> VnOptions(const ExperimentConfig& cfg, Seed seed) {
  if (cfg.metrics.vn_triplets == 0) return std::nullopt;
  return VirtualNormalOptions{*cfg.dataset.intrinsics, cfg.metrics.vn_triplets, seed};
}

}  // namespace

fs::path SparsePath(const ExperimentConfig& cfg, const std::string& id) {
  return cfg.output_dir / "sparse" / (id + "_sparse" + std::string(Extension(cfg.output.format)));
}

fs::path CompletedPath(const ExperimentConfig& cfg, const std::string& id) {
  return cfg.output_dir / "completed" /
         (id + "_completed" + std::string(Extension(cfg.output.format)));
}

RunResult CmdSynth(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.Validate();
  const SparsitySpec spec = EffectiveSpec(cfg);
  const Seed seed = UsesSparsity(cfg) ? RequireSeed(cfg, "synth") : Seed{cfg.seed.value_or(0)};
  const std::vector<std::string> ids = ListImageIds(cfg.dataset);
  if (cfg.protocol && cfg.protocol->kind == ProtocolKind::kNoisy) {
    RequireDir(cfg.dataset.root / cfg.dataset.noisy_dir, "noisy");
  }
  if (UsesSparsity(cfg) && spec.NeedsImage()) {
    RequireDir(cfg.dataset.root / cfg.dataset.rgb_dir, "rgb");
  }
  fs::create_directories(cfg.output_dir / "sparse");

  const DatasetConfig& ds = cfg.dataset;
  const auto outcomes = RunPerImage(ids, ResolveJobs(cfg, ids.size()),
                                    [&](std::size_t i, Outcome& o) {
    const std::string& id = ids[i];
    const fs::path gt_path = GtPath(ds, id);
    const DepthMap gt = LoadDepth(gt_path, ds.depth_format, ds.depth_scale);
    const DepthMap sparse = MakeSparse(cfg, spec, gt, id, Hash64(seed, id));
    const fs::path out = SparsePath(cfg, id);
    SaveDepth(sparse, out, cfg.output.format, cfg.output.scale);
    o.files.push_back(out);
    o.record["gt"] = gt_path.string();
    o.record["sparse"] = out.string();
    o.record["gt_valid"] = gt.valid_count();
    o.record["sparse_valid"] = sparse.valid_count();
  });
  return WriteManifest(cfg, "synth", ids, outcomes, CollectRecords(outcomes), {}, log);
}

RunResult CmdComplete(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.Validate();
  const Seed seed =
      CompletionIsStochastic(cfg) ? RequireSeed(cfg, "complete") : Seed{cfg.seed.value_or(0)};
  CheckCompletionInputs(cfg);
  const std::vector<std::string> ids = ListImageIds(cfg.dataset);
  RequireDir(cfg.output_dir / "sparse", "sparse input");
  fs::create_directories(cfg.output_dir / "completed");

  const unsigned jobs = ResolveJobs(cfg, ids.size());
  const CompletionConfig params = PerImageCompletion(cfg, jobs);
  const auto outcomes = RunPerImage(ids, jobs, [&](std::size_t i, Outcome& o) {
    const std::string& id = ids[i];
    const fs::path in = SparsePath(cfg, id);
    o.record["gt"] = GtPath(cfg.dataset, id).string();
    o.record["sparse"] = in.string();
    const DepthMap sparse = LoadDepth(in, cfg.output.format, cfg.output.scale);
    const DepthMap completed = Complete(cfg, params, sparse, id, Hash64(seed, id), &o.record);
    const fs::path out = CompletedPath(cfg, id);
    SaveDepth(completed, out, cfg.output.format, cfg.output.scale);
    o.files.push_back(out);
    o.record["completed"] = out.string();
  });
  return WriteManifest(cfg, "complete", ids, outcomes, CollectRecords(outcomes), {}, log);
}

RunResult CmdEval(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.Validate();
  const Seed seed = cfg.metrics.vn_triplets > 0 ? RequireSeed(cfg, "eval with vn_triplets")
                                                : Seed{cfg.seed.value_or(0)};
  const std::vector<std::string> ids = ListImageIds(cfg.dataset);
  std::size_t pairable = 0;
  for (const std::string& id : ids) pairable += fs::exists(PredictionPath(cfg, id));
  if (pairable == 0) throw std::invalid_argument("no pairable images (no predictions found)");

  const DatasetConfig& ds = cfg.dataset;
  auto outcomes = RunPerImage(ids, ResolveJobs(cfg, ids.size()),
                              [&](std::size_t i, Outcome& o) {
    const std::string& id = ids[i];
    const fs::path gt_path = GtPath(ds, id);
    const fs::path pred_path = PredictionPath(cfg, id);
    o.record["gt"] = gt_path.string();
    o.record["completed"] = pred_path.string();
    const DepthMap gt = LoadDepth(gt_path, ds.depth_format, ds.depth_scale);
    const DepthMap pred = LoadDepth(pred_path, cfg.output.format, cfg.output.scale);
    o.report = EvalPair(pred, gt, cfg.metrics.taus, VnOptions(cfg, Hash64(seed, id)));
    o.record["metrics"] = ReportJson(*o.report);
  });

  std::vector<ImageMetrics> rows;
  std::vector<MetricReport> reports;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!outcomes[i].report) continue;
    rows.push_back({ids[i], *outcomes[i].report});
    reports.push_back(*outcomes[i].report);
  }
  const fs::path csv = cfg.output_dir / "eval.csv";
  const fs::path md = cfg.output_dir / "eval.md";
  WriteText(csv, MetricsCsv(rows, cfg.metrics.taus, cfg.metrics.vn_triplets > 0));
  std::string table = "no images evaluated\n";
  json records = CollectRecords(outcomes);
  json aggregate = nullptr;
  if (!reports.empty()) {
    const MetricReport agg = Aggregate(reports);
    table = MetricsMarkdown(agg, reports.size(), ids.size() - reports.size());
    aggregate = ReportJson(agg);
  }
  WriteText(md, table);
  return WriteManifest(cfg, "eval", ids, outcomes, std::move(records), {csv, md}, log,
                       {{"aggregate", aggregate}});
}

RunResult CmdSweep(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.Validate();
  const Seed seed = RequireSeed(cfg, "sweep");
  const SweepSection& sweep = cfg.sweep;
  if (sweep.grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (const double v : sweep.grid) {
    if (sweep.axis == SweepAxis::kPoints && (v < 0 || v != std::floor(v))) {
      throw std::invalid_argument("sweep over points needs non-negative integer grid values");
    }
    if (sweep.axis == SweepAxis::kOutlierRatio && !(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("sweep over outlier_ratio needs grid values in [0, 1]");
    }
  }
  CheckCompletionInputs(cfg);
  const std::vector<std::string> ids = ListImageIds(cfg.dataset);

  std::vector<SparsitySpec> specs;
  for (const double v : sweep.grid) {
    SparsitySpec spec;
    if (cfg.sparsity) spec.outlier_factor_range = cfg.sparsity->outlier_factor_range;
    const bool by_points = sweep.axis == SweepAxis::kPoints;
    const auto count = by_points ? static_cast<long long>(v) : sweep.points;
    spec.point_count_range = {count, count};
    spec.outlier_ratio = by_points ? sweep.outlier_ratio : v;
    specs.push_back(spec);
  }

  const unsigned jobs = ResolveJobs(cfg, ids.size());
  const CompletionConfig params = PerImageCompletion(cfg, jobs);
  const std::size_t n_grid = specs.size();
  std::vector<std::vector<std::optional<MetricReport>>> reports(
      n_grid, std::vector<std::optional<MetricReport>>(ids.size()));
  const DatasetConfig& ds = cfg.dataset;
  const auto outcomes = RunPerImage(ids, jobs, [&](std::size_t i, Outcome&) {
    const std::string& id = ids[i];
    const DepthMap gt = LoadDepth(GtPath(ds, id), ds.depth_format, ds.depth_scale);
    const Seed image_seed = Hash64(seed, id);
    std::vector<std::string> errors;
    for (std::size_t g = 0; g < n_grid; ++g) {
      try {
        const DepthMap sparse = Synthesize(gt, nullptr, specs[g], image_seed);
        const DepthMap completed = Complete(cfg, params, sparse, id, image_seed, nullptr);
        reports[g][i] =
            EvalPair(completed, gt, cfg.metrics.taus, VnOptions(cfg, image_seed));
      } catch (const std::exception& e) {
        errors.push_back(fmt::format("{}={}: {}", ToString(sweep.axis),
                                     FormatDouble(sweep.grid[g]), e.what()));
      }
    }
    if (!errors.empty()) {
      std::string joined;
      for (const std::string& e : errors) joined += (joined.empty() ? "" : "; ") + e;
      throw std::runtime_error(joined);
    }
  });

  std::vector<SweepPoint> points;
  json records = json::array();
  for (std::size_t g = 0; g < n_grid; ++g) {
    std::vector<MetricReport> ok;
    json missing = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (reports[g][i]) {
        ok.push_back(*reports[g][i]);
      } else {
        missing.push_back(ids[i]);
      }
    }
    json record = {{"value", sweep.grid[g]}, {"images", ok.size()}, {"failed", missing}};
    if (!ok.empty()) {
      const MetricReport agg = Aggregate(ok);
      points.push_back({sweep.grid[g], agg.absrel, agg.rmse, agg.delta.front().second});
      record["metrics"] = ReportJson(agg);
    }
    records.push_back(std::move(record));
  }
  const fs::path csv = cfg.output_dir / "sweep.csv";
  const fs::path svg = cfg.output_dir / "sweep.svg";
  WriteText(csv, SweepCsv(ToString(sweep.axis), points));
  WriteText(svg, SweepSvg(ToString(sweep.axis), points));
  return WriteManifest(cfg, "sweep", ids, outcomes, std::move(records), {csv, svg}, log);
}

void MakeSyntheticDataset(const fs::path& root, const SyntheticDatasetOptions& options) {
  if (options.count <= 0) throw std::invalid_argument("synthetic dataset needs count > 0");
  const double depth_scale =
      options.format == DepthFormat::kPng16 ? kDefaultPng16Scale : 1.0;
  const std::string ext(Extension(options.format));
  fs::create_directories(root / "depth");
  fs::create_directories(root / "guidance");
  fs::create_directories(root / "rgb");
  SyntheticOptions scene_options;
  scene_options.guidance_distortion = options.guidance_distortion;
  CameraIntrinsics k;
  for (int i = 0; i < options.count; ++i) {
    const std::string id = fmt::format("scene_{:04d}", i);
    const SyntheticScene scene = MakeSyntheticScene(
        options.width, options.height, Hash64(Seed{options.seed}, id), scene_options);
    SaveDepth(scene.depth, root / "depth" / (id + ext), options.format, depth_scale);
    SaveDepth(scene.guidance, root / "guidance" / (id + ".pfm"), DepthFormat::kPfm);
    SaveRgb(scene.rgb, root / "rgb" / (id + ".png"));
    k = scene.intrinsics;
  }
  const json config = {
      {"seed", options.seed},
      {"output_dir", "out"},
      {"dataset",
       {{"root", "."},
        {"depth_format", ToString(options.format)},
        {"depth_scale", depth_scale},
        {"guidance_format", "pfm"},
        {"intrinsics", {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}}}}},
      {"sparsity", SparsitySpecToJson(SparsitySpec{})},
      {"completion", {{"method", "guidance"}}},
      {"metrics", {{"taus", kDefaultTaus}, {"vn_triplets", 0}}},
      {"sweep", {{"axis", "points"}, {"grid", {500, 2500, 20000}}}}};
  WriteText(root / "config.json", config.dump(2) + "\n");
}

}  // namespace depthkit::bench
