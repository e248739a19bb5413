#pragma once

#include <cstdint>
#include <vector>

#include "entgen/noise.hpp"
#include "entgen/riccati.hpp"

namespace entgen {

/// One noise realization of the conditional-mean SDE under optimal feedback.
struct Trajectory {
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::vector<Vec4> samples;  // X_c at every step, including t = 0
  std::vector<Vec4> strobe;   // subsequence at integer periods
};

struct EnsembleStats {
  std::size_t n = 0;
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Zero();     // unbiased sample covariance
  Mat4 stderr_cov = Mat4::Zero();  // per-entry standard error estimates
};

/// Counter-based per-trajectory stream seed (splitmix64 over the pair), so
/// ensembles are reproducible and order-independent.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index);

/// Euler-Maruyama integration of
///   dX = (A(t) - B K(t)) X dt + Sigma^c(t) C^T W^-1 dw,   X(0) = 0,
/// with dw Gaussian increments of covariance W dt; K and Sigma^c are
/// piecewise-constant on the solver grid. substeps subdivides each grid cell
/// (dt = T / (n_steps * substeps)). zero_noise suppresses dw (deterministic
/// closed loop, for testing).
Trajectory simulate_trajectory(const SystemParams& p, const ModelMatrices& m,
                               const PeriodicSolution& sol,
                               std::uint64_t seed, int n_periods,
                               int substeps = 1, bool zero_noise = false);

/// Sample mean/covariance of X_c across an ensemble at one intra-period
/// phase (grid index into the final simulated period).
EnsembleStats ensemble_stats(const std::vector<Trajectory>& trajectories,
                             int phase_index, int n_steps, int substeps = 1);

/// Streaming ensemble runner: simulates `n` independent trajectories
/// (master_seed + index streams), discards burn_in_periods, and accumulates
/// statistics at the requested phases of the final period with compensated
/// summation. Returns one EnsembleStats per phase.
std::vector<EnsembleStats> run_ensemble(const SystemParams& p,
                                        const ModelMatrices& m,
                                        const PeriodicSolution& sol,
                                        std::size_t n,
                                        std::uint64_t master_seed,
                                        int burn_in_periods,
                                        const std::vector<int>& phase_indices,
                                        int substeps = 1, int threads = 1);

}  // namespace entgen
