#include "entgen/trajectories.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace entgen {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Per-cell propagation data, periodic in the grid index.
struct StepTables {
  std::vector<Mat4> drift;  // A(t_i) - B K(t_i), piecewise constant
  std::vector<Mat4> noise_in;  // Sigma^c(t_i) C^T W^-1 L, W = L L^T
  double h = 0.0;
};

StepTables build_tables(const SystemParams& p, const ModelMatrices& m,
                        const PeriodicSolution& sol, int substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const int n = sol.n_steps;
  if (static_cast<int>(sol.sigma_c.size()) != n + 1 ||
      static_cast<int>(sol.gain.size()) != n + 1)
    throw std::invalid_argument("solution grid mismatch");
  Eigen::LLT<Mat2> llt(m.W);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("W is not positive definite");
  const Mat2 l = llt.matrixL();
  const Mat2 winv = m.W.inverse();

  StepTables t;
  t.h = sol.period / (n * substeps);
  t.drift.resize(n);
  t.noise_in.resize(n);
  for (int i = 0; i < n; ++i) {
    const double ti = i * (sol.period / n);
    t.drift[i] = drift_matrix(p, ti) - m.B * sol.gain[i];
    const Mat42 gain_in = sol.sigma_c[i] * m.C.transpose() * winv;
    t.noise_in[i] = Mat4::Zero();
    t.noise_in[i].block<4, 2>(0, 0) = gain_in * l;
  }
  return t;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ (index + 1));
}

Trajectory simulate_trajectory(const SystemParams& p, const ModelMatrices& m,
                               const PeriodicSolution& sol,
                               std::uint64_t seed, int n_periods,
                               int substeps, bool zero_noise) {
  if (n_periods < 1) throw std::invalid_argument("n_periods must be >= 1");
  const StepTables tab = build_tables(p, m, sol, substeps);
  const int n = sol.n_steps;
  const int steps_per_period = n * substeps;
  const double h = tab.h;
  const double sqrth = std::sqrt(h);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Trajectory traj;
  traj.seed = seed;
  traj.dt = h;
  traj.samples.reserve(static_cast<std::size_t>(n_periods) * steps_per_period + 1);
  traj.strobe.reserve(n_periods + 1);

  Vec4 x = Vec4::Zero();
  traj.samples.push_back(x);
  traj.strobe.push_back(x);
  for (int period = 0; period < n_periods; ++period) {
    for (int s = 0; s < steps_per_period; ++s) {
      const int cell = s / substeps;
      Vec4 dx = tab.drift[cell] * x * h;
      if (!zero_noise) {
        Vec4 z = Vec4::Zero();
        z(0) = normal(rng);
        z(1) = normal(rng);
        dx += sqrth * (tab.noise_in[cell] * z);
      }
      x += dx;
      traj.samples.push_back(x);
    }
    if (!x.allFinite())
      throw std::runtime_error("trajectory diverged (closed-loop instability)");
    traj.strobe.push_back(x);
  }
  return traj;
}

EnsembleStats ensemble_stats(const std::vector<Trajectory>& trajectories,
                             int phase_index, int n_steps, int substeps) {
  if (trajectories.size() < 2)
    throw std::invalid_argument("need at least two trajectories");
  const std::size_t len = trajectories.front().samples.size();
  const int steps_per_period = n_steps * substeps;
  if (phase_index < 0 || phase_index > n_steps)
    throw std::invalid_argument("phase index out of range");
  const std::size_t idx =
      len - 1 - static_cast<std::size_t>(steps_per_period) +
      static_cast<std::size_t>(phase_index) * substeps;

  EnsembleStats st;
  st.n = trajectories.size();
  Vec4 sum = Vec4::Zero();
  Mat4 sum2 = Mat4::Zero();
  for (const Trajectory& tr : trajectories) {
    if (tr.samples.size() != len)
      throw std::invalid_argument("inconsistent trajectory grids");
    const Vec4& x = tr.samples[idx];
    sum += x;
    sum2 += x * x.transpose();
  }
  const double n = static_cast<double>(st.n);
  st.mean = sum / n;
  st.cov = (sum2 - n * st.mean * st.mean.transpose()) / (n - 1.0);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      st.stderr_cov(k, l) = std::sqrt(
          (st.cov(k, k) * st.cov(l, l) + st.cov(k, l) * st.cov(k, l)) /
          (n - 1.0));
  return st;
}

std::vector<EnsembleStats> run_ensemble(const SystemParams& p,
                                        const ModelMatrices& m,
                                        const PeriodicSolution& sol,
                                        std::size_t n,
                                        std::uint64_t master_seed,
                                        int burn_in_periods,
                                        const std::vector<int>& phase_indices,
                                        int substeps, int threads) {
  if (n < 2) throw std::invalid_argument("need at least two trajectories");
  const StepTables tab = build_tables(p, m, sol, substeps);
  const int steps_per_period = sol.n_steps * substeps;
  const int n_periods = burn_in_periods + 1;
  const double h = tab.h;
  const double sqrth = std::sqrt(h);
  const std::size_t n_phases = phase_indices.size();

  // Kahan-compensated accumulators per phase, merged in fixed chunk order.
  struct Acc {
    Eigen::Matrix<double, 4, 1> sum = Vec4::Zero(), sum_c = Vec4::Zero();
    Mat4 sum2 = Mat4::Zero(), sum2_c = Mat4::Zero();
    void add_vec(const Vec4& v) {
      const Vec4 y = v - sum_c;
      const Vec4 t = sum + y;
      sum_c = (t - sum) - y;
      sum = t;
    }
    void add_outer(const Mat4& v) {
      const Mat4 y = v - sum2_c;
      const Mat4 t = sum2 + y;
      sum2_c = (t - sum2) - y;
      sum2 = t;
    }
  };

  // Trajectories are accumulated in fixed-size blocks and the block partial
  // sums are reduced in block order, so the result is bit-identical for any
  // worker count and scheduling order.
  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  const int n_workers =
      static_cast<int>(std::min<std::size_t>(std::max(1, threads), n_blocks));
  std::vector<std::vector<Acc>> block_acc(n_blocks,
                                          std::vector<Acc>(n_phases));
  std::vector<std::exception_ptr> worker_err(n_workers);

  auto run_block = [&](std::size_t block) {
    std::vector<Acc>& acc = block_acc[block];
    const std::size_t begin = block * kBlock;
    const std::size_t end = std::min(n, begin + kBlock);
    {
      for (std::size_t traj = begin; traj < end; ++traj) {
        std::mt19937_64 rng(stream_seed(master_seed, traj));
        std::normal_distribution<double> normal(0.0, 1.0);
        Vec4 x = Vec4::Zero();
        for (int period = 0; period < n_periods; ++period) {
          const bool last = period + 1 == n_periods;
          std::size_t next_phase = 0;
          for (int s = 0; s < steps_per_period; ++s) {
            const int cell = s / substeps;
            Vec4 z = Vec4::Zero();
            z(0) = normal(rng);
            z(1) = normal(rng);
            x += tab.drift[cell] * x * h + sqrth * (tab.noise_in[cell] * z);
            if (last) {
              while (next_phase < n_phases &&
                     phase_indices[next_phase] * substeps == s + 1) {
                acc[next_phase].add_vec(x);
                acc[next_phase].add_outer(x * x.transpose());
                ++next_phase;
              }
            }
          }
          if (!x.allFinite())
            throw std::runtime_error(
                "trajectory diverged (closed-loop instability)");
        }
      }
    }
  };

  for (std::size_t i = 0; i < n_phases; ++i) {
    if (phase_indices[i] < 1 || phase_indices[i] > sol.n_steps)
      throw std::invalid_argument(
          "phase index out of range (must be 1..n_steps)");
    if (i > 0 && phase_indices[i] <= phase_indices[i - 1])
      throw std::invalid_argument("phase indices must be strictly increasing");
  }

  if (n_workers == 1) {
    for (std::size_t block = 0; block < n_blocks; ++block) run_block(block);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t b = next.fetch_add(1); b < n_blocks;
               b = next.fetch_add(1))
            run_block(b);
        } catch (...) {
          worker_err[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : worker_err)
      if (err) std::rethrow_exception(err);
  }

  std::vector<EnsembleStats> out(n_phases);
  const double dn = static_cast<double>(n);
  for (std::size_t ph = 0; ph < n_phases; ++ph) {
    Acc total;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      total.add_vec(block_acc[b][ph].sum);
      total.add_outer(block_acc[b][ph].sum2);
    }
    EnsembleStats& st = out[ph];
    st.n = n;
    st.mean = total.sum / dn;
    st.cov = (total.sum2 - dn * st.mean * st.mean.transpose()) / (dn - 1.0);
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l)
        st.stderr_cov(k, l) = std::sqrt(
            (st.cov(k, k) * st.cov(l, l) + st.cov(k, l) * st.cov(k, l)) /
            (dn - 1.0));
  }
  return out;
}

}  // namespace entgen
