#include "entgen/noise.hpp"

#include <stdexcept>

namespace entgen {

std::vector<Mat4> excess_noise(const SystemParams& p, const ModelMatrices& m,
                               const PeriodicSolution& sol,
                               const SolverOptions& opts) {
  const int n = sol.n_steps;
  if (n % 2 != 0) throw std::invalid_argument("n_steps must be even");
  if (static_cast<int>(sol.sigma_c.size()) != n + 1 ||
      static_cast<int>(sol.gain.size()) != n + 1)
    throw std::invalid_argument("solution grid mismatch");

  const double T = sol.period;
  const double h = T / n;
  Eigen::FullPivLU<Mat2> lu(m.W);
  if (!lu.isInvertible()) throw std::invalid_argument("W is singular");
  const Mat2 winv = lu.inverse();

  // Closed-loop drift and source at every grid sample.
  std::vector<Mat4> drift(n + 1), source(n + 1);
  for (int i = 0; i <= n; ++i) {
    drift[i] = drift_matrix(p, i * h) - m.B * sol.gain[i];
    const Mat42 gsrc = sol.sigma_c[i] * m.C.transpose() + m.M;
    source[i] = gsrc * winv * gsrc.transpose();
  }

  // RK4 over doubled steps so midpoint values are exact grid samples.
  const auto rhs = [&](int i, const Mat4& xi) -> Mat4 {
    return drift[i] * xi + xi * drift[i].transpose() + source[i];
  };

  Mat4 xi = Mat4::Zero();
  std::vector<Mat4> samples(n + 1);
  for (int period = 0; period < opts.max_periods; ++period) {
    const Mat4 start = xi;
    samples[0] = xi;
    for (int i = 0; i < n; i += 2) {
      const Mat4 k1 = rhs(i, xi);
      const Mat4 k2 = rhs(i + 1, xi + h * k1);
      const Mat4 k3 = rhs(i + 1, xi + h * k2);
      const Mat4 k4 = rhs(i + 2, xi + 2.0 * h * k3);
      xi = symmetrize(xi + (2.0 * h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
      samples[i + 1] = xi;  // interior odd samples filled below
      samples[i + 2] = xi;
    }
    if (!xi.allFinite() || xi.norm() > opts.overflow_limit)
      throw std::overflow_error("excess noise diverged (unstable closed loop)");
    const double defect = (xi - start).norm() / std::max(start.norm(), 1e-300);
    if (defect < opts.tol_periodic) break;
    if (period + 1 == opts.max_periods)
      throw std::runtime_error("excess noise did not reach a periodic solution");
  }

  // Odd samples: one local RK4 step of size h from the adjacent even sample
  // (interpolated midpoint stages). Local error only; the periodic defect is
  // carried entirely by the even grid.
  for (int i = 0; i < n; i += 2) {
    const Mat4 x = samples[i];
    const Mat4 mid_drift = 0.5 * (drift[i] + drift[i + 1]);
    const Mat4 mid_src = 0.5 * (source[i] + source[i + 1]);
    const auto rhs_mid = [&](const Mat4& y) -> Mat4 {
      return mid_drift * y + y * mid_drift.transpose() + mid_src;
    };
    const Mat4 k1 = rhs(i, x);
    const Mat4 k2 = rhs_mid(x + 0.5 * h * k1);
    const Mat4 k3 = rhs_mid(x + 0.5 * h * k2);
    const Mat4 k4 = rhs(i + 1, x + h * k3);
    samples[i + 1] =
        symmetrize(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return samples;
}

Mat4 unconditional_covariance(const Mat4& sigma_c, const Mat4& xi) {
  return sigma_c + xi;
}

}  // namespace entgen
