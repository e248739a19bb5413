#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entgen/model.hpp"
#include "entgen/riccati.hpp"

namespace entgen {

enum class Mode { solve, map, boundary, trace, montecarlo };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// One sweep axis: `count` points from start to stop, linear or log spaced.
struct AxisSpec {
  double start = 0.0;
  double stop = 1.0;
  int count = 1;
  bool log_scale = false;
  std::vector<double> values() const;
};

struct MapSpec {
  AxisSpec g1;
  AxisSpec omega;
};

struct BoundarySpec {
  AxisSpec g0;                       // swept axis (signed; repulsive < 0)
  std::optional<double> g1_ratio;    // g1 = ratio * |g0|
  std::optional<double> g1_fixed;    // or a fixed g1
  std::vector<double> eta = {0.25, 0.5, 0.75, 1.0};
  int omega_points = 61;             // log-spaced per resonance window
  double window_lo = 0.8;
  double window_hi = 1.2;
  double bisect_tol = 1e-3;          // in the swept parameter
};

struct MonteCarloSpec {
  std::size_t n_trajectories = 10000;
  int burn_in_periods = 10;
  int substeps = 1;
  int n_phases = 4;
};

struct OutputSpec {
  std::string dir = ".";
};

struct ExperimentConfig {
  std::optional<Mode> mode;
  std::uint64_t seed = 1;
  SystemParams params;
  SolverOptions solver;
  bool clamp_average = false;
  MatrixOverrides overrides;
  std::optional<MapSpec> map;
  std::optional<BoundarySpec> boundary;
  MonteCarloSpec montecarlo;
  OutputSpec output;

  /// Fully resolved key=value pairs, echoed into every output file header.
  std::vector<std::pair<std::string, std::string>> provenance() const;
};

/// Strict parse: unknown keys, type mismatches and range violations are
/// errors with field diagnostics.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace entgen
