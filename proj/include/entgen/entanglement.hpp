#pragma once

#include <utility>
#include <vector>

#include "entgen/types.hpp"

namespace entgen {

/// Symplectic eigenvalues (nu1 <= nu2) of a symmetric positive-definite 4x4
/// covariance matrix: moduli of the eigenvalue pairs of i*J*sigma. Physical
/// states have nu1 >= 1/2 (vacuum convention).
std::pair<double, double> symplectic_eigenvalues(const Mat4& sigma);

/// Partial transposition on mode 2: sigma~ = L sigma L, L = diag(1,1,1,-1).
Mat4 partial_transpose(const Mat4& sigma);

/// E_N = -ln(2 nu~) with nu~ the smallest symplectic eigenvalue of the
/// partially transposed covariance. Signed (not clamped); E_N > 0 detects
/// entanglement and max(0, E_N) is the logarithmic negativity proper.
double log_negativity(const Mat4& sigma);

/// Trapezoidal average of periodic samples (first and last sample are the
/// same phase; both endpoints must be present).
double period_average(const std::vector<double>& samples);

/// Main parametric resonance 2*Omega* = 2*sqrt(omega0^2 + 4*omega0*g0).
/// Throws std::domain_error at or beyond the repulsive instability
/// threshold (radicand <= 0).
double resonance_frequency(double g0, double omega0);

/// Time-resolved conditional/unconditional negativity over one period.
struct NegativityTrace {
  std::vector<double> times;
  std::vector<double> e_n_c;
  std::vector<double> e_n_u;
  double mean_c = 0.0;
  double mean_u = 0.0;
  double max_c = 0.0;
  double max_u = 0.0;
};

/// Builds the trace from matched period samples of Sigma^c and Xi.
/// clamp_average: average max(0, E_N) instead of the signed values.
NegativityTrace negativity_trace(const std::vector<Mat4>& sigma_c,
                                 const std::vector<Mat4>& xi, double period,
                                 bool clamp_average = false);

}  // namespace entgen
