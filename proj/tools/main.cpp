#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entgen/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool dump_traj = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir,
                  "Output directory (overrides output.dir)");
  cmd->add_option("--seed", args.seed, "Master RNG seed (overrides config)");
  cmd->add_option("--threads", args.threads, "Worker thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--dump-trajectories", args.dump_traj,
                "Also write raw sample trajectories (CSV)");
}

entgen::ExperimentConfig load(const CommonArgs& args, entgen::Mode mode) {
  entgen::ExperimentConfig cfg = entgen::parse_config(args.config_path);
  if (cfg.mode && *cfg.mode != mode)
    throw std::runtime_error("config declares mode '" +
                             entgen::to_string(*cfg.mode) +
                             "' but the '" + entgen::to_string(mode) +
                             "' subcommand was invoked");
  if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
  if (args.seed) cfg.seed = *args.seed;
  return cfg;
}

void maybe_dump(const CommonArgs& args, const entgen::ExperimentConfig& cfg) {
  if (!args.dump_traj) return;
  const auto path =
      (std::filesystem::path(cfg.output.dir) / "trajectories.csv").string();
  entgen::dump_trajectories(cfg, 10, path);
  std::printf("wrote %s\n", path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic Riccati / entanglement-generation toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* cmd_solve = app.add_subcommand(
      "solve", "Solve one parameter point and dump the periodic orbit");
  CLI::App* cmd_map = app.add_subcommand(
      "map", "Sweep the (g1, Omega) plane of period-averaged negativity");
  CLI::App* cmd_boundary = app.add_subcommand(
      "boundary", "Locate the separability boundary along the g0 axis");
  CLI::App* cmd_trace = app.add_subcommand(
      "trace", "Intra-period negativity trace plus stationary reference");
  CLI::App* cmd_mc = app.add_subcommand(
      "montecarlo", "Validate the excess-noise covariance by simulation");
  for (CLI::App* cmd : {cmd_solve, cmd_map, cmd_boundary, cmd_trace, cmd_mc})
    add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_solve->parsed()) {
      const auto cfg = load(args, entgen::Mode::solve);
      write_solve_outputs(cfg, entgen::run_solve(cfg), cfg.output.dir);
      maybe_dump(args, cfg);
    } else if (cmd_map->parsed()) {
      const auto cfg = load(args, entgen::Mode::map);
      write_map_outputs(cfg, entgen::run_map(cfg, args.threads),
                        cfg.output.dir);
    } else if (cmd_boundary->parsed()) {
      const auto cfg = load(args, entgen::Mode::boundary);
      write_boundary_outputs(cfg, entgen::run_boundary(cfg, args.threads),
                             cfg.output.dir);
    } else if (cmd_trace->parsed()) {
      const auto cfg = load(args, entgen::Mode::trace);
      write_trace_outputs(cfg, entgen::run_trace(cfg), cfg.output.dir);
    } else if (cmd_mc->parsed()) {
      const auto cfg = load(args, entgen::Mode::montecarlo);
      const auto report = entgen::run_montecarlo(cfg, args.threads);
      write_montecarlo_outputs(cfg, report, cfg.output.dir);
      maybe_dump(args, cfg);
      std::printf("montecarlo consistency: %s\n",
                  report.pass ? "pass" : "FAIL");
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
