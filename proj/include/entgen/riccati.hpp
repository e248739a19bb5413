#pragma once

#include <vector>

#include "entgen/model.hpp"
#include "entgen/params.hpp"
#include "entgen/types.hpp"

namespace entgen {

struct SolverOptions {
  int n_steps = 1024;          // samples per period (power of two, even)
  double tol_periodic = 1e-8;  // relative period-to-period defect
  int min_periods = 20;        // lower bound on integration horizon
  int max_periods = 4000;      // horizon for period iteration
  double overflow_limit = 1e12;
  double cond_limit = 1e12;
};

/// One period of the closed-loop solution, sampled at t_i = i*T/n_steps,
/// i = 0..n_steps (both endpoints included).
struct PeriodicSolution {
  double period = 0.0;
  int n_steps = 0;
  std::vector<Mat4> sigma_c;  // conditional covariance Sigma^c(t_i)
  std::vector<Mat24> gain;    // feedback gain K(t_i)
  std::vector<Mat4> costate;  // LQR Riccati variable Pi(t_i)
};

/// Hamiltonian matrix [[A^T, -C^T W^-1 C], [-V, -A]] of the filter Riccati
/// equation. J*H is symmetric by construction.
Mat8 build_hamiltonian(const Mat4& A, const Mat24& C, const Mat2& W,
                       const Mat4& V);

/// Per-step propagators over one modulation period, 4th-order Magnus
/// (two-point Gauss-Legendre). forward[i] advances the H flow from t_i to
/// t_{i+1}; backward[i] advances the -H flow over the same step (NOT the
/// inverse of forward[i] beyond 2nd order, since the commutator term keeps
/// its sign under flow reversal).
struct StepPropagators {
  std::vector<Mat8> forward;
  std::vector<Mat8> backward;
};
StepPropagators step_propagators(const SystemParams& p,
                                 const ModelMatrices& m, int n_steps);

/// Monodromy S over one period: time-ordered product of the forward step
/// propagators. Throws on overflow (documented instability at small q /
/// low Omega).
Mat8 monodromy(const SystemParams& p, const ModelMatrices& m, int n_steps,
               double overflow_limit = 1e12);
Mat8 monodromy(const StepPropagators& props, double overflow_limit = 1e12);

/// Periodic filter Riccati solution via ordered real Schur decomposition of
/// the monodromy: stable invariant subspace gives Sigma^c(0), the 8x4 basis
/// is then propagated through the period with per-step QR
/// re-orthonormalization. Returns n_steps+1 samples.
std::vector<Mat4> periodic_riccati_schur(const SystemParams& p,
                                         const ModelMatrices& m,
                                         const SolverOptions& opts);

/// Brute-force oracle: RK4 integration of the Riccati ODE from sigma0,
/// period by period, until the T-periodic defect drops below tolerance.
/// Returns the final period (n_steps+1 samples).
std::vector<Mat4> riccati_direct(const SystemParams& p,
                                 const ModelMatrices& m, const Mat4& sigma0,
                                 const SolverOptions& opts);

/// Backward LQR Riccati iterated to its T-periodic fixed point from Pi = 0.
/// Fills the costate and gain (K = B^T Pi / q) samples of `out`.
void lqr_gain(const SystemParams& p, const ModelMatrices& m,
              const SolverOptions& opts, PeriodicSolution& out);

/// Full periodic solve: Schur Riccati + LQR gain on a common grid.
PeriodicSolution solve_periodic(const SystemParams& p, const ModelMatrices& m,
                                const SolverOptions& opts);

/// Open-loop drift stability at the Floquet/eigenvalue level. Marginal
/// (defective, polynomially growing) cases count as unstable; purely
/// oscillatory spectra are stable.
bool drift_is_stable(const SystemParams& p, int n_steps = 1024);

/// Floquet multipliers of the closed loop A - B K(t) over one period.
Eigen::Vector4cd closed_loop_multipliers(const SystemParams& p,
                                         const ModelMatrices& m,
                                         const PeriodicSolution& sol);

}  // namespace entgen
