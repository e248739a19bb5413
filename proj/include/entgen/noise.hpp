#pragma once

#include <vector>

#include "entgen/riccati.hpp"

namespace entgen {

/// Excess-noise matrix Xi(t): covariance added by the measurement-feedback
/// loop, obeying the Lyapunov equation with closed-loop drift A - B K(t) and
/// source (Sigma^c C^T + M) W^-1 (Sigma^c C^T + M)^T. Integrated from
/// Xi(0) = 0 over successive periods until T-periodic; returns one period on
/// the solver grid (n_steps+1 samples).
std::vector<Mat4> excess_noise(const SystemParams& p, const ModelMatrices& m,
                               const PeriodicSolution& sol,
                               const SolverOptions& opts);

/// Unconditional covariance Sigma^u = Sigma^c + Xi.
Mat4 unconditional_covariance(const Mat4& sigma_c, const Mat4& xi);

}  // namespace entgen
