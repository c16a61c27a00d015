#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "depthkit/bench/commands.h"
#include "depthkit/bench/config.h"

namespace {

namespace bench = depthkit::bench;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> method;
  std::optional<std::string> protocol;
  std::optional<unsigned> jobs;
  std::optional<std::string> axis;
  std::vector<double> grid;
};

void AddCommonOptions(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", o.seed, "base seed; per-image seeds are hash64(seed, id)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--method", o.method, "completion method: guidance, idw, nearest");
  cmd->add_option("--protocol", o.protocol,
                  "benchmark protocol: unpaired_fov, sparse_tof, short_range, noisy");
  cmd->add_option("--jobs", o.jobs, "image workers, 0 = all cores");
}

bench::ExperimentConfig Resolve(const Overrides& o) {
  bench::ExperimentConfig cfg = bench::LoadConfig(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = std::filesystem::absolute(*o.out);
  if (o.method) cfg.completion.method = bench::ParseCompletionMethod(*o.method);
  if (o.protocol) {
    bench::ProtocolSection p = cfg.protocol.value_or(bench::ProtocolSection{});
    p.kind = depthkit::ParseProtocolKind(*o.protocol);
    cfg.protocol = p;
    cfg.sparsity.reset();
  }
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.axis) cfg.sweep.axis = bench::ParseSweepAxis(*o.axis);
  if (!o.grid.empty()) cfg.sweep.grid = o.grid;
  cfg.Validate();
  return cfg;
}

void Summarize(std::string_view command, const bench::RunResult& r) {
  std::cerr << fmt::format("{}: {} images, {} failed, manifest {}\n", command, r.processed,
                           r.failed.size(), r.manifest.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depthkit: sparse depth benchmark toolkit"};
  app.require_subcommand(1);

  Overrides o;
  CLI::App* synth = app.add_subcommand("synth", "write sparse inputs from ground truth");
  CLI::App* complete = app.add_subcommand("complete", "densify sparse inputs");
  CLI::App* eval = app.add_subcommand("eval", "score completed maps against ground truth");
  CLI::App* sweep = app.add_subcommand("sweep", "synth, complete and eval over a parameter grid");
  for (CLI::App* cmd : {synth, complete, eval, sweep}) AddCommonOptions(cmd, o);
  sweep->add_option("--axis", o.axis, "points or outlier_ratio");
  sweep->add_option("--grid", o.grid, "ascending grid values")->delimiter(',');

  bench::SyntheticDatasetOptions synthetic;
  std::string synthetic_root;
  std::string synthetic_format = "pfm";
  CLI::App* make = app.add_subcommand("make-synthetic", "write a seeded synthetic dataset");
  make->add_option("--out", synthetic_root, "dataset root")->required();
  make->add_option("--seed", synthetic.seed, "scene seed")->required();
  make->add_option("--count", synthetic.count, "number of scenes");
  make->add_option("--width", synthetic.width, "image width");
  make->add_option("--height", synthetic.height, "image height");
  make->add_option("--distortion", synthetic.guidance_distortion,
                   "non-affine warp amplitude of the guidance");
  make->add_option("--format", synthetic_format, "depth format: png16, pfm, rawf32");

  CLI11_PARSE(app, argc, argv);

  try {
    if (make->parsed()) {
      synthetic.format = depthkit::ParseDepthFormat(synthetic_format);
      bench::MakeSyntheticDataset(synthetic_root, synthetic);
      std::cerr << fmt::format("make-synthetic: {} scenes in {}\n", synthetic.count,
                               synthetic_root);
      return bench::kExitOk;
    }
    const bench::ExperimentConfig cfg = Resolve(o);
    bench::RunResult result;
    std::string_view name;
    if (synth->parsed()) {
      name = "synth";
      result = bench::CmdSynth(cfg, std::cerr);
    } else if (complete->parsed()) {
      name = "complete";
      result = bench::CmdComplete(cfg, std::cerr);
    } else if (eval->parsed()) {
      name = "eval";
      result = bench::CmdEval(cfg, std::cerr);
    } else {
      name = "sweep";
      result = bench::CmdSweep(cfg, std::cerr);
    }
    Summarize(name, result);
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bench::kExitError;
  }
}
