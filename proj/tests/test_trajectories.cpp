#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entgen/trajectories.hpp"

using namespace entgen;

namespace {
SystemParams reference_params() {
  SystemParams p;
  p.g0 = 0.2;
  p.g1 = 0.17;
  p.omega_mod = 2.7;
  p.gamma_ba = 0.05;
  p.gamma_th = 0.0025;
  p.eta = 1.0;
  p.q = 0.1;
  p.phi = M_PI;
  return p;
}
}  // namespace

TEST_CASE("stream seeds are distinct and order-independent") {
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  CHECK(stream_seed(42, 7) == stream_seed(42, 7));
}

TEST_CASE("zero-noise trajectory from the origin stays at the origin") {
  const SystemParams p = reference_params();
  const ModelMatrices m = build_model(p);
  SolverOptions opts;
  const PeriodicSolution sol = solve_periodic(p, m, opts);
  const Trajectory tr = simulate_trajectory(p, m, sol, 1, 3, 1, true);
  for (const Vec4& x : tr.samples) CHECK(x.norm() == 0.0);
  CHECK(tr.strobe.size() == 4);  // t = 0, T, 2T, 3T
}

TEST_CASE("same seed reproduces the trajectory bit for bit") {
  const SystemParams p = reference_params();
  const ModelMatrices m = build_model(p);
  SolverOptions opts;
  const PeriodicSolution sol = solve_periodic(p, m, opts);
  const Trajectory a = simulate_trajectory(p, m, sol, 123, 2);
  const Trajectory b = simulate_trajectory(p, m, sol, 123, 2);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK((a.samples[i] - b.samples[i]).norm() == 0.0);
  const Trajectory c = simulate_trajectory(p, m, sol, 124, 2);
  CHECK((a.samples.back() - c.samples.back()).norm() > 0.0);
}

TEST_CASE("ensemble statistics: zero-noise covariance is exactly zero") {
  const SystemParams p = reference_params();
  const ModelMatrices m = build_model(p);
  SolverOptions opts;
  const PeriodicSolution sol = solve_periodic(p, m, opts);
  std::vector<Trajectory> trs;
  for (int i = 0; i < 5; ++i)
    trs.push_back(simulate_trajectory(p, m, sol, i, 2, 1, true));
  const EnsembleStats st = ensemble_stats(trs, opts.n_steps / 2, opts.n_steps);
  CHECK(st.mean.norm() == 0.0);
  CHECK(st.cov.norm() == 0.0);
}

TEST_CASE("standard error scales like 1/sqrt(N)") {
  const SystemParams p = reference_params();
  const ModelMatrices m = build_model(p);
  SolverOptions opts;
  opts.n_steps = 256;
  const PeriodicSolution sol = solve_periodic(p, m, opts);
  const std::vector<int> phases{opts.n_steps};
  const auto small = run_ensemble(p, m, sol, 100, 7, 4, phases);
  const auto large = run_ensemble(p, m, sol, 10000, 7, 4, phases);
  const double ratio =
      small[0].stderr_cov(1, 1) / large[0].stderr_cov(1, 1);
  CHECK(ratio == doctest::Approx(10.0).epsilon(0.35));
}

TEST_CASE("ensemble runner is deterministic and thread-count independent") {
  const SystemParams p = reference_params();
  const ModelMatrices m = build_model(p);
  SolverOptions opts;
  opts.n_steps = 256;
  const PeriodicSolution sol = solve_periodic(p, m, opts);
  const std::vector<int> phases{opts.n_steps / 2, opts.n_steps};
  const auto one = run_ensemble(p, m, sol, 200, 11, 2, phases, 1, 1);
  const auto two = run_ensemble(p, m, sol, 200, 11, 2, phases, 1, 3);
  for (std::size_t k = 0; k < phases.size(); ++k) {
    CHECK((one[k].cov - two[k].cov).norm() == 0.0);
    CHECK((one[k].mean - two[k].mean).norm() == 0.0);
  }
}

TEST_CASE("phase indices are validated") {
  const SystemParams p = reference_params();
  const ModelMatrices m = build_model(p);
  SolverOptions opts;
  opts.n_steps = 256;
  const PeriodicSolution sol = solve_periodic(p, m, opts);
  CHECK_THROWS_AS(run_ensemble(p, m, sol, 10, 1, 1, {0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_ensemble(p, m, sol, 10, 1, 1, {300}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_ensemble(p, m, sol, 10, 1, 1, {128, 64}),
                  std::invalid_argument);
}
