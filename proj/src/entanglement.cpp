#include "entgen/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace entgen {

std::pair<double, double> symplectic_eigenvalues(const Mat4& sigma) {
  if ((sigma - sigma.transpose()).norm() > 1e-10 * std::max(sigma.norm(), 1.0))
    throw std::invalid_argument("covariance matrix is not symmetric");
  {
    Eigen::SelfAdjointEigenSolver<Mat4> es(sigma);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("covariance matrix is not positive definite");
  }
  const Mat4 js = symplectic_form() * sigma;
  Eigen::EigenSolver<Mat4> es(js);
  std::array<double, 4> mods;
  for (int i = 0; i < 4; ++i) mods[i] = std::abs(es.eigenvalues()(i));
  std::sort(mods.begin(), mods.end());
  return {0.5 * (mods[0] + mods[1]), 0.5 * (mods[2] + mods[3])};
}

Mat4 partial_transpose(const Mat4& sigma) {
  Mat4 lambda = Mat4::Identity();
  lambda(3, 3) = -1.0;
  return lambda * sigma * lambda;
}

double log_negativity(const Mat4& sigma) {
  const auto [nu1, nu2] = symplectic_eigenvalues(partial_transpose(sigma));
  (void)nu2;
  return -std::log(2.0 * nu1);
}

double period_average(const std::vector<double>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("need at least two samples");
  double acc = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) acc += samples[i];
  return acc / static_cast<double>(samples.size() - 1);
}

double resonance_frequency(double g0, double omega0) {
  const double radicand = omega0 * omega0 + 4.0 * omega0 * g0;
  if (radicand <= 0.0)
    throw std::domain_error("relative mode unstable: omega0^2 + 4*omega0*g0 <= 0");
  return 2.0 * std::sqrt(radicand);
}

NegativityTrace negativity_trace(const std::vector<Mat4>& sigma_c,
                                 const std::vector<Mat4>& xi, double period,
                                 bool clamp_average) {
  if (sigma_c.size() != xi.size() || sigma_c.size() < 2)
    throw std::invalid_argument("mismatched or empty period samples");
  const std::size_t n = sigma_c.size();
  NegativityTrace tr;
  tr.times.resize(n);
  tr.e_n_c.resize(n);
  tr.e_n_u.resize(n);
  const double dt = period / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    tr.times[i] = dt * static_cast<double>(i);
    tr.e_n_c[i] = log_negativity(sigma_c[i]);
    tr.e_n_u[i] = log_negativity(sigma_c[i] + xi[i]);
  }
  auto averaged = [&](const std::vector<double>& v) {
    if (!clamp_average) return period_average(v);
    std::vector<double> clamped(v.size());
    std::transform(v.begin(), v.end(), clamped.begin(),
                   [](double x) { return std::max(0.0, x); });
    return period_average(clamped);
  };
  tr.mean_c = averaged(tr.e_n_c);
  tr.mean_u = averaged(tr.e_n_u);
  tr.max_c = *std::max_element(tr.e_n_c.begin(), tr.e_n_c.end());
  tr.max_u = *std::max_element(tr.e_n_u.begin(), tr.e_n_u.end());
  return tr;
}

}  // namespace entgen
