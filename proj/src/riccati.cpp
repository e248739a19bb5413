#include "entgen/riccati.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <lapacke.h>

#include <unsupported/Eigen/MatrixFunctions>

extern "C" {
static lapack_logical entgen_select_inside_unit_disk(const double* wr,
                                                     const double* wi) {
  return (*wr) * (*wr) + (*wi) * (*wi) < 1.0;
}
}

namespace entgen {
namespace {

constexpr double kGaussOffset = 0.28867513459481287;  // sqrt(3)/6

// RK4 step for dS/dt = f(t, S) on 4x4 matrices.
template <typename F>
Mat4 rk4_step(const F& f, const Mat4& s, double t, double h) {
  const Mat4 k1 = f(t, s);
  const Mat4 k2 = f(t + 0.5 * h, s + 0.5 * h * k1);
  const Mat4 k3 = f(t + 0.5 * h, s + 0.5 * h * k2);
  const Mat4 k4 = f(t + h, s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Ordered real Schur factor of S with the stable (|lambda| < 1) invariant
// subspace ordered first. Returns the orthogonal factor; sdim gets the
// stable subspace dimension.
Mat8 ordered_schur_stable_first(Mat8 s, int* sdim) {
  Mat8 u;
  double wr[8], wi[8];
  lapack_int sd = 0;
  const lapack_int info = LAPACKE_dgees(
      LAPACK_COL_MAJOR, 'V', 'S', entgen_select_inside_unit_disk, 8, s.data(), 8,
      &sd, wr, wi, u.data(), 8);
  if (info != 0)
    throw std::runtime_error("ordered Schur decomposition failed (dgees info=" +
                             std::to_string(info) + ")");
  *sdim = static_cast<int>(sd);
  return u;
}

Mat84 thin_qr(const Mat84& basis) {
  Eigen::HouseholderQR<Mat84> qr(basis);
  return qr.householderQ() * Mat84::Identity();
}

// Sigma = bottom * top^-1 with a conditioning guard on the top block.
Mat4 graph_readoff(const Mat84& basis, double cond_limit) {
  const Mat4 top = basis.topRows<4>();
  const Mat4 bottom = basis.bottomRows<4>();
  Eigen::JacobiSVD<Mat4> svd(top);
  const double smin = svd.singularValues()(3);
  if (smin <= 0.0 || svd.singularValues()(0) / smin > cond_limit)
    throw std::runtime_error("ill-conditioned subspace basis (U11)");
  return symmetrize(bottom * top.inverse());
}

bool spectrum_is_stable(const Eigen::MatrixXcd& m,
                        const Eigen::VectorXcd& eigs, double boundary,
                        double tol) {
  for (int i = 0; i < eigs.size(); ++i) {
    const double growth = (boundary == 0.0) ? eigs(i).real()
                                            : std::abs(eigs(i)) - 1.0;
    if (growth > tol) return false;
  }
  // Marginal eigenvalues: a repeated eigenvalue on the stability boundary
  // with a deficient eigenspace grows polynomially.
  for (int i = 0; i < eigs.size(); ++i) {
    const double growth = (boundary == 0.0) ? eigs(i).real()
                                            : std::abs(eigs(i)) - 1.0;
    if (std::abs(growth) > tol) continue;
    int algebraic = 0;
    for (int j = 0; j < eigs.size(); ++j)
      if (std::abs(eigs(j) - eigs(i)) < 1e-6) ++algebraic;
    if (algebraic < 2) continue;
    Eigen::MatrixXcd shifted = m;
    shifted.diagonal().array() -= eigs(i);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    const double scale = svd.singularValues()(0);
    int kernel = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) < 1e-7 * scale) ++kernel;
    if (kernel < algebraic) return false;
  }
  return true;
}

}  // namespace

Mat8 build_hamiltonian(const Mat4& A, const Mat24& C, const Mat2& W,
                       const Mat4& V) {
  Eigen::FullPivLU<Mat2> lu(W);
  if (!lu.isInvertible()) throw std::invalid_argument("W is singular");
  const Mat4 q = C.transpose() * lu.inverse() * C;
  Mat8 h;
  h.block<4, 4>(0, 0) = A.transpose();
  h.block<4, 4>(0, 4) = -q;
  h.block<4, 4>(4, 0) = -V;
  h.block<4, 4>(4, 4) = -A;
  return h;
}

StepPropagators step_propagators(const SystemParams& p,
                                 const ModelMatrices& m, int n_steps) {
  if (n_steps < 256) throw std::invalid_argument("n_steps must be >= 256");
  const double T = p.period();
  const double h = T / n_steps;
  StepPropagators props;
  props.forward.reserve(n_steps);
  props.backward.reserve(n_steps);
  for (int i = 0; i < n_steps; ++i) {
    const double t0 = i * h;
    const double ta = t0 + (0.5 - kGaussOffset) * h;
    const double tb = t0 + (0.5 + kGaussOffset) * h;
    const Mat8 h1 = build_hamiltonian(drift_matrix(p, ta), m.C, m.W, m.V);
    const Mat8 h2 = build_hamiltonian(drift_matrix(p, tb), m.C, m.W, m.V);
    const Mat8 mean = 0.5 * h * (h1 + h2);
    const Mat8 comm =
        (std::sqrt(3.0) / 12.0) * h * h * (h2 * h1 - h1 * h2);
    props.forward.push_back((mean + comm).exp());
    props.backward.push_back((-mean + comm).exp());
  }
  return props;
}

Mat8 monodromy(const StepPropagators& props, double overflow_limit) {
  Mat8 s = Mat8::Identity();
  for (const Mat8& phi : props.forward) {
    s = phi * s;
    if (!s.allFinite() || s.norm() > overflow_limit)
      throw std::overflow_error("monodromy overflow");
  }
  return s;
}

Mat8 monodromy(const SystemParams& p, const ModelMatrices& m, int n_steps,
               double overflow_limit) {
  return monodromy(step_propagators(p, m, n_steps), overflow_limit);
}

std::vector<Mat4> periodic_riccati_schur(const SystemParams& p,
                                         const ModelMatrices& m,
                                         const SolverOptions& opts) {
  const StepPropagators props = step_propagators(p, m, opts.n_steps);
  const Mat8 s = monodromy(props, opts.overflow_limit);

  int sdim = 0;
  const Mat8 u = ordered_schur_stable_first(s, &sdim);
  if (sdim != 4)
    throw std::runtime_error("no 4-dimensional stable invariant subspace (dim=" +
                             std::to_string(sdim) + ")");

  Mat84 basis = u.leftCols<4>();
  Mat4 sigma0 = graph_readoff(basis, opts.cond_limit);
  {
    Eigen::SelfAdjointEigenSolver<Mat4> es(sigma0);
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw std::runtime_error(
          "stable-subspace candidate Sigma^c(0) is not PSD");
  }

  // Propagate the subspace under the -H flow, whose graph dynamics is the
  // forward filter Riccati equation, re-orthonormalizing each step.
  std::vector<Mat4> sigma;
  sigma.reserve(opts.n_steps + 1);
  sigma.push_back(sigma0);
  basis = thin_qr(basis);
  for (int i = 0; i < opts.n_steps; ++i) {
    basis = thin_qr(props.backward[i] * basis);
    sigma.push_back(graph_readoff(basis, opts.cond_limit));
  }
  return sigma;
}

std::vector<Mat4> riccati_direct(const SystemParams& p,
                                 const ModelMatrices& m, const Mat4& sigma0,
                                 const SolverOptions& opts) {
  Eigen::FullPivLU<Mat2> lu(m.W);
  if (!lu.isInvertible()) throw std::invalid_argument("W is singular");
  const Mat4 q = m.C.transpose() * lu.inverse() * m.C;
  const Mat4 v = m.V;
  const auto f = [&](double t, const Mat4& s) -> Mat4 {
    const Mat4 a = drift_matrix(p, t);
    return a * s + s * a.transpose() + v - s * q * s;
  };
  const double T = p.period();
  const double h = T / opts.n_steps;

  Mat4 s = symmetrize(sigma0);
  std::vector<Mat4> samples(opts.n_steps + 1);
  for (int period = 0; period < opts.max_periods; ++period) {
    const Mat4 start = s;
    samples[0] = s;
    for (int i = 0; i < opts.n_steps; ++i) {
      s = symmetrize(rk4_step(f, s, i * h, h));
      samples[i + 1] = s;
    }
    if (!s.allFinite() || s.norm() > opts.overflow_limit)
      throw std::overflow_error("riccati_direct diverged (unstable filter)");
    const double defect = (s - start).norm() / std::max(start.norm(), 1e-300);
    if (period + 1 >= opts.min_periods && defect < opts.tol_periodic)
      return samples;
  }
  throw std::runtime_error("riccati_direct did not reach a periodic solution");
}

void lqr_gain(const SystemParams& p, const ModelMatrices& m,
              const SolverOptions& opts, PeriodicSolution& out) {
  const Mat4 bbq = m.B * m.B.transpose() / p.q;
  // dPi/dt = -A^T Pi - Pi A - P + Pi (B B^T / q) Pi, integrated backwards.
  const auto f = [&](double t, const Mat4& pi) -> Mat4 {
    const Mat4 a = drift_matrix(p, t);
    return -a.transpose() * pi - pi * a - m.P + pi * bbq * pi;
  };
  const double T = p.period();
  const double h = T / opts.n_steps;

  Mat4 pi = Mat4::Zero();
  std::vector<Mat4> samples(opts.n_steps + 1);
  bool converged = false;
  for (int period = 0; period < opts.max_periods && !converged; ++period) {
    const Mat4 terminal = pi;
    samples[opts.n_steps] = pi;
    for (int i = opts.n_steps; i > 0; --i) {
      pi = symmetrize(rk4_step(f, pi, i * h, -h));
      samples[i - 1] = pi;
    }
    if (!pi.allFinite() || pi.norm() > opts.overflow_limit)
      throw std::overflow_error("backward Riccati blow-up (control effort too small)");
    Eigen::SelfAdjointEigenSolver<Mat4> es(pi);
    if (es.eigenvalues().minCoeff() < -1e-8 * std::max(pi.norm(), 1.0))
      throw std::runtime_error("backward Riccati lost positive semidefiniteness");
    const double defect =
        (pi - terminal).norm() / std::max(terminal.norm(), 1e-300);
    converged = defect < opts.tol_periodic;
  }
  if (!converged)
    throw std::runtime_error("backward Riccati did not reach a periodic solution");

  out.costate = samples;
  out.gain.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out.gain[i] = m.B.transpose() * samples[i] / p.q;
}

PeriodicSolution solve_periodic(const SystemParams& p, const ModelMatrices& m,
                                const SolverOptions& opts) {
  PeriodicSolution sol;
  sol.period = p.period();
  sol.n_steps = opts.n_steps;
  sol.sigma_c = periodic_riccati_schur(p, m, opts);
  lqr_gain(p, m, opts, sol);
  return sol;
}

bool drift_is_stable(const SystemParams& p, int n_steps) {
  if (p.g1 == 0.0) {
    const Mat4 a = drift_matrix(p, 0.0);
    Eigen::EigenSolver<Mat4> es(a);
    return spectrum_is_stable(a.cast<std::complex<double>>(),
                              es.eigenvalues(), 0.0, 1e-9);
  }
  // Floquet multipliers of the open-loop drift over one period.
  const double T = p.period();
  const double h = T / n_steps;
  Mat4 mono = Mat4::Identity();
  for (int i = 0; i < n_steps; ++i) {
    const double t0 = i * h;
    const Mat4 a1 = drift_matrix(p, t0 + (0.5 - kGaussOffset) * h);
    const Mat4 a2 = drift_matrix(p, t0 + (0.5 + kGaussOffset) * h);
    const Mat4 gen = 0.5 * h * (a1 + a2) +
                     (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
    mono = gen.exp() * mono;
    if (!mono.allFinite() || mono.norm() > 1e12) return false;
  }
  Eigen::EigenSolver<Mat4> es(mono);
  return spectrum_is_stable(mono.cast<std::complex<double>>(),
                            es.eigenvalues(), 1.0, 1e-9);
}

Eigen::Vector4cd closed_loop_multipliers(const SystemParams& p,
                                         const ModelMatrices& m,
                                         const PeriodicSolution& sol) {
  const int n = sol.n_steps;
  const double h = sol.period / n;
  Mat4 mono = Mat4::Identity();
  for (int i = 0; i < n; ++i) {
    const Mat24 k_mid = 0.5 * (sol.gain[i] + sol.gain[i + 1]);
    const Mat4 f = drift_matrix(p, (i + 0.5) * h) - m.B * k_mid;
    mono = (f * h).exp() * mono;
  }
  Eigen::EigenSolver<Mat4> es(mono);
  return es.eigenvalues();
}

}  // namespace entgen
