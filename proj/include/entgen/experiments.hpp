#pragma once

#include <string>
#include <vector>

#include "entgen/config.hpp"
#include "entgen/entanglement.hpp"
#include "entgen/noise.hpp"
#include "entgen/trajectories.hpp"

namespace entgen {

enum class PointStatus { converged, unstable, failed };
std::string to_string(PointStatus s);

/// Period-averaged observables of one parameter point.
struct PointOutcome {
  PointStatus status = PointStatus::failed;
  double mean_c = 0.0;
  double mean_u = 0.0;
  double max_c = 0.0;
  double max_u = 0.0;
  std::string message;
};

/// Full pipeline at one point: Schur Riccati -> LQR gain -> excess noise ->
/// negativity trace. Solver failures are mapped to a status, not thrown.
PointOutcome evaluate_point(const SystemParams& p,
                            const MatrixOverrides& overrides,
                            const SolverOptions& opts,
                            bool clamp_average = false);

struct SweepResult {
  std::vector<double> g1_axis;
  std::vector<double> omega_axis;
  std::vector<PointOutcome> points;  // row-major: g1 outer, omega inner
};

SweepResult run_map(const ExperimentConfig& cfg, int threads = 1);

struct BoundaryRow {
  double eta = 0.0;
  double g0 = 0.0;
  double g1 = 0.0;
  PointOutcome best;        // maximum over the Omega scan
  double omega_best_c = 0.0;
  double omega_best_u = 0.0;
};

struct BoundaryCrossing {
  double eta = 0.0;
  bool found = false;
  double g0 = 0.0;  // separability boundary <E_N> = 0 along the g0 axis
};

struct BoundaryResult {
  std::vector<BoundaryRow> rows;
  std::vector<BoundaryCrossing> crossings_c;
  std::vector<BoundaryCrossing> crossings_u;
};

BoundaryResult run_boundary(const ExperimentConfig& cfg, int threads = 1);

struct TraceResult {
  NegativityTrace modulated;
  double ref_e_n_c = 0.0;  // stationary (g1 = 0) reference values
  double ref_e_n_u = 0.0;
};

TraceResult run_trace(const ExperimentConfig& cfg);

struct MonteCarloPhaseReport {
  int phase_index = 0;
  Mat4 xi = Mat4::Zero();
  Mat4 ensemble_cov = Mat4::Zero();
  Mat4 z_scores = Mat4::Zero();
  double max_abs_z = 0.0;
};

struct MonteCarloReport {
  std::size_t n_trajectories = 0;
  std::vector<MonteCarloPhaseReport> phases;
  bool pass = false;  // all entries within 3 standard errors
};

MonteCarloReport run_montecarlo(const ExperimentConfig& cfg, int threads = 1);

/// Per-sample dump of one full solve (Sigma^c, Xi, E_N traces).
struct SolveDump {
  PeriodicSolution sol;
  std::vector<Mat4> xi;
  NegativityTrace trace;
};
SolveDump run_solve(const ExperimentConfig& cfg);

// Deterministic writers: CSV with a '# key=value' provenance header and a
// JSON summary with per-point exit status.
void write_map_outputs(const ExperimentConfig& cfg, const SweepResult& result,
                       const std::string& dir);
void write_boundary_outputs(const ExperimentConfig& cfg,
                            const BoundaryResult& result,
                            const std::string& dir);
void write_trace_outputs(const ExperimentConfig& cfg, const TraceResult& result,
                         const std::string& dir);
void write_montecarlo_outputs(const ExperimentConfig& cfg,
                              const MonteCarloReport& report,
                              const std::string& dir);
void write_solve_outputs(const ExperimentConfig& cfg, const SolveDump& dump,
                         const std::string& dir);

/// Optional raw-trajectory CSV dump (one file, trajectories stacked).
void dump_trajectories(const ExperimentConfig& cfg, std::size_t n,
                       const std::string& path);

}  // namespace entgen
