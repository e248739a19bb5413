#include "entgen/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

namespace entgen {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (n_workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void write_provenance(std::ofstream& out, const ExperimentConfig& cfg) {
  for (const auto& [key, value] : cfg.provenance())
    out << "# " << key << "=" << value << "\n";
}

// Maximum of the period-averaged negativities over the log-spaced Omega scan
// around both parametric resonances Omega* and 2*Omega*.
struct ScanBest {
  PointOutcome best;
  double omega_best_c = 0.0;
  double omega_best_u = 0.0;
};

ScanBest scan_omega(const ExperimentConfig& cfg, double eta, double g0,
                    double g1, const BoundarySpec& spec, int threads) {
  ScanBest result;
  double two_omega_star;
  try {
    two_omega_star = resonance_frequency(g0, 1.0);
  } catch (const std::domain_error& e) {
    result.best.status = PointStatus::unstable;
    result.best.message = e.what();
    return result;
  }
  std::vector<double> omegas;
  for (const double center : {0.5 * two_omega_star, two_omega_star}) {
    AxisSpec ax;
    ax.start = spec.window_lo * center;
    ax.stop = spec.window_hi * center;
    ax.count = spec.omega_points;
    ax.log_scale = true;
    const auto vals = ax.values();
    omegas.insert(omegas.end(), vals.begin(), vals.end());
  }

  std::vector<PointOutcome> outcomes(omegas.size());
  parallel_for(omegas.size(), threads, [&](std::size_t i) {
    SystemParams p = cfg.params;
    p.eta = eta;
    p.g0 = g0;
    p.g1 = g1;
    p.omega_mod = omegas[i];
    outcomes[i] = evaluate_point(p, cfg.overrides, cfg.solver, cfg.clamp_average);
  });

  bool any = false;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const PointOutcome& o = outcomes[i];
    if (o.status != PointStatus::converged) continue;
    if (!any || o.mean_c > result.best.mean_c) {
      result.best.mean_c = o.mean_c;
      result.best.max_c = o.max_c;
      result.omega_best_c = omegas[i];
    }
    if (!any || o.mean_u > result.best.mean_u) {
      result.best.mean_u = o.mean_u;
      result.best.max_u = o.max_u;
      result.omega_best_u = omegas[i];
    }
    any = true;
  }
  result.best.status = any ? PointStatus::converged : PointStatus::failed;
  if (!any) result.best.message = "no Omega scan point converged";
  return result;
}

double boundary_g1(const BoundarySpec& spec, double g0) {
  return spec.g1_ratio ? *spec.g1_ratio * std::abs(g0) : *spec.g1_fixed;
}

}  // namespace

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::converged: return "converged";
    case PointStatus::unstable: return "unstable";
    case PointStatus::failed: return "failed";
  }
  return "?";
}

PointOutcome evaluate_point(const SystemParams& p,
                            const MatrixOverrides& overrides,
                            const SolverOptions& opts, bool clamp_average) {
  PointOutcome out;
  try {
    const ModelMatrices m = build_model(p, overrides);
    const PeriodicSolution sol = solve_periodic(p, m, opts);
    const std::vector<Mat4> xi = excess_noise(p, m, sol, opts);
    const NegativityTrace tr =
        negativity_trace(sol.sigma_c, xi, sol.period, clamp_average);
    out.status = PointStatus::converged;
    out.mean_c = tr.mean_c;
    out.mean_u = tr.mean_u;
    out.max_c = tr.max_c;
    out.max_u = tr.max_u;
  } catch (const std::overflow_error& e) {
    out.status = PointStatus::unstable;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.status = PointStatus::failed;
    out.message = e.what();
  }
  return out;
}

SweepResult run_map(const ExperimentConfig& cfg, int threads) {
  if (!cfg.map) throw std::runtime_error("config has no 'map' section");
  SweepResult result;
  result.g1_axis = cfg.map->g1.values();
  result.omega_axis = cfg.map->omega.values();
  const std::size_t n_omega = result.omega_axis.size();
  result.points.resize(result.g1_axis.size() * n_omega);

  parallel_for(result.points.size(), threads, [&](std::size_t idx) {
    SystemParams p = cfg.params;
    p.g1 = result.g1_axis[idx / n_omega];
    p.omega_mod = result.omega_axis[idx % n_omega];
    result.points[idx] =
        evaluate_point(p, cfg.overrides, cfg.solver, cfg.clamp_average);
  });
  return result;
}

BoundaryResult run_boundary(const ExperimentConfig& cfg, int threads) {
  if (!cfg.boundary) throw std::runtime_error("config has no 'boundary' section");
  const BoundarySpec& spec = *cfg.boundary;
  const std::vector<double> g0_axis = spec.g0.values();

  BoundaryResult result;
  for (const double eta : spec.eta) {
    std::vector<ScanBest> scans(g0_axis.size());
    for (std::size_t i = 0; i < g0_axis.size(); ++i) {
      scans[i] = scan_omega(cfg, eta, g0_axis[i], boundary_g1(spec, g0_axis[i]),
                            spec, threads);
      BoundaryRow row;
      row.eta = eta;
      row.g0 = g0_axis[i];
      row.g1 = boundary_g1(spec, g0_axis[i]);
      row.best = scans[i].best;
      row.omega_best_c = scans[i].omega_best_c;
      row.omega_best_u = scans[i].omega_best_u;
      result.rows.push_back(row);
    }

    // Bisect the first sign change of the scan maximum along the g0 axis.
    const auto bisect = [&](auto value_of) {
      BoundaryCrossing crossing;
      crossing.eta = eta;
      for (std::size_t i = 0; i + 1 < g0_axis.size(); ++i) {
        if (scans[i].best.status != PointStatus::converged ||
            scans[i + 1].best.status != PointStatus::converged)
          continue;
        double fa = value_of(scans[i].best);
        double fb = value_of(scans[i + 1].best);
        if (fa == 0.0) {
          crossing.found = true;
          crossing.g0 = g0_axis[i];
          return crossing;
        }
        if (fa * fb >= 0.0) continue;
        double a = g0_axis[i], b = g0_axis[i + 1];
        while (std::abs(b - a) > spec.bisect_tol) {
          const double mid = 0.5 * (a + b);
          const ScanBest sm =
              scan_omega(cfg, eta, mid, boundary_g1(spec, mid), spec, threads);
          if (sm.best.status != PointStatus::converged) break;
          if (fa * value_of(sm.best) <= 0.0) {
            b = mid;
          } else {
            a = mid;
            fa = value_of(sm.best);
          }
        }
        crossing.found = true;
        crossing.g0 = 0.5 * (a + b);
        return crossing;
      }
      return crossing;
    };
    result.crossings_c.push_back(
        bisect([](const PointOutcome& o) { return o.mean_c; }));
    result.crossings_u.push_back(
        bisect([](const PointOutcome& o) { return o.mean_u; }));
  }
  return result;
}

TraceResult run_trace(const ExperimentConfig& cfg) {
  TraceResult result;
  const SolveDump dump = run_solve(cfg);
  result.modulated = dump.trace;

  ExperimentConfig ref = cfg;
  ref.params.g1 = 0.0;
  const SolveDump ref_dump = run_solve(ref);
  result.ref_e_n_c = ref_dump.trace.mean_c;
  result.ref_e_n_u = ref_dump.trace.mean_u;
  return result;
}

SolveDump run_solve(const ExperimentConfig& cfg) {
  SolveDump dump;
  const ModelMatrices m = build_model(cfg.params, cfg.overrides);
  dump.sol = solve_periodic(cfg.params, m, cfg.solver);
  dump.xi = excess_noise(cfg.params, m, dump.sol, cfg.solver);
  dump.trace = negativity_trace(dump.sol.sigma_c, dump.xi, dump.sol.period,
                                cfg.clamp_average);
  return dump;
}

MonteCarloReport run_montecarlo(const ExperimentConfig& cfg, int threads) {
  const MonteCarloSpec& mc = cfg.montecarlo;
  const ModelMatrices m = build_model(cfg.params, cfg.overrides);
  const PeriodicSolution sol = solve_periodic(cfg.params, m, cfg.solver);
  const std::vector<Mat4> xi = excess_noise(cfg.params, m, sol, cfg.solver);

  std::vector<int> phases(mc.n_phases);
  for (int k = 0; k < mc.n_phases; ++k)
    phases[k] = (k + 1) * sol.n_steps / mc.n_phases;

  const std::vector<EnsembleStats> stats =
      run_ensemble(cfg.params, m, sol, mc.n_trajectories, cfg.seed,
                   mc.burn_in_periods, phases, mc.substeps, threads);

  MonteCarloReport report;
  report.n_trajectories = mc.n_trajectories;
  report.pass = true;
  for (int k = 0; k < mc.n_phases; ++k) {
    MonteCarloPhaseReport ph;
    ph.phase_index = phases[k];
    ph.xi = xi[phases[k]];
    ph.ensemble_cov = stats[k].cov;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        ph.z_scores(r, c) = (stats[k].cov(r, c) - ph.xi(r, c)) /
                            stats[k].stderr_cov(r, c);
    ph.max_abs_z = ph.z_scores.cwiseAbs().maxCoeff();
    report.pass = report.pass && ph.max_abs_z <= 3.0;
    report.phases.push_back(ph);
  }
  return report;
}

void write_map_outputs(const ExperimentConfig& cfg, const SweepResult& result,
                       const std::string& dir) {
  std::ofstream csv = open_output(dir, "map.csv");
  write_provenance(csv, cfg);
  csv << "g1,omega,status,mean_c,mean_u,max_c,max_u\n";
  const std::size_t n_omega = result.omega_axis.size();
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const PointOutcome& o = result.points[i];
    csv << fmt(result.g1_axis[i / n_omega]) << ","
        << fmt(result.omega_axis[i % n_omega]) << "," << to_string(o.status);
    if (o.status == PointStatus::converged)
      csv << "," << fmt(o.mean_c) << "," << fmt(o.mean_u) << ","
          << fmt(o.max_c) << "," << fmt(o.max_u);
    else
      csv << ",,,,";
    csv << "\n";
  }

  nlohmann::json summary;
  summary["mode"] = "map";
  for (const auto& [k, v] : cfg.provenance()) summary["config"][k] = v;
  std::size_t converged = 0, unstable = 0, failed = 0;
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const PointOutcome& o = result.points[i];
    if (o.status == PointStatus::converged) ++converged;
    if (o.status == PointStatus::unstable) ++unstable;
    if (o.status == PointStatus::failed) ++failed;
    points.push_back({{"g1", result.g1_axis[i / n_omega]},
                      {"omega", result.omega_axis[i % n_omega]},
                      {"status", to_string(o.status)}});
  }
  summary["counts"] = {{"converged", converged},
                       {"unstable", unstable},
                       {"failed", failed}};
  summary["points"] = points;
  std::ofstream json_out = open_output(dir, "map_summary.json");
  json_out << summary.dump(2) << "\n";
}

void write_boundary_outputs(const ExperimentConfig& cfg,
                            const BoundaryResult& result,
                            const std::string& dir) {
  std::ofstream csv = open_output(dir, "boundary.csv");
  write_provenance(csv, cfg);
  csv << "eta,g0,g1,status,mean_c,mean_u,omega_best_c,omega_best_u\n";
  for (const BoundaryRow& row : result.rows) {
    csv << fmt(row.eta) << "," << fmt(row.g0) << "," << fmt(row.g1) << ","
        << to_string(row.best.status);
    if (row.best.status == PointStatus::converged)
      csv << "," << fmt(row.best.mean_c) << "," << fmt(row.best.mean_u) << ","
          << fmt(row.omega_best_c) << "," << fmt(row.omega_best_u);
    else
      csv << ",,,,";
    csv << "\n";
  }

  std::ofstream cross = open_output(dir, "boundary_crossings.csv");
  write_provenance(cross, cfg);
  cross << "eta,observable,found,g0_crossing\n";
  for (const BoundaryCrossing& c : result.crossings_c)
    cross << fmt(c.eta) << ",mean_c," << (c.found ? "true" : "false") << ","
          << (c.found ? fmt(c.g0) : "") << "\n";
  for (const BoundaryCrossing& c : result.crossings_u)
    cross << fmt(c.eta) << ",mean_u," << (c.found ? "true" : "false") << ","
          << (c.found ? fmt(c.g0) : "") << "\n";

  nlohmann::json summary;
  summary["mode"] = "boundary";
  for (const auto& [k, v] : cfg.provenance()) summary["config"][k] = v;
  nlohmann::json rows = nlohmann::json::array();
  for (const BoundaryRow& row : result.rows)
    rows.push_back({{"eta", row.eta},
                    {"g0", row.g0},
                    {"status", to_string(row.best.status)}});
  summary["rows"] = rows;
  std::ofstream json_out = open_output(dir, "boundary_summary.json");
  json_out << summary.dump(2) << "\n";
}

void write_trace_outputs(const ExperimentConfig& cfg, const TraceResult& result,
                         const std::string& dir) {
  std::ofstream csv = open_output(dir, "trace.csv");
  write_provenance(csv, cfg);
  csv << "# ref_e_n_c=" << fmt(result.ref_e_n_c) << "\n";
  csv << "# ref_e_n_u=" << fmt(result.ref_e_n_u) << "\n";
  csv << "t,e_n_c,e_n_u\n";
  const NegativityTrace& tr = result.modulated;
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    csv << fmt(tr.times[i]) << "," << fmt(tr.e_n_c[i]) << ","
        << fmt(tr.e_n_u[i]) << "\n";

  nlohmann::json summary;
  summary["mode"] = "trace";
  for (const auto& [k, v] : cfg.provenance()) summary["config"][k] = v;
  summary["mean_c"] = tr.mean_c;
  summary["mean_u"] = tr.mean_u;
  summary["max_u"] = tr.max_u;
  summary["ref_e_n_c"] = result.ref_e_n_c;
  summary["ref_e_n_u"] = result.ref_e_n_u;
  std::ofstream json_out = open_output(dir, "trace_summary.json");
  json_out << summary.dump(2) << "\n";
}

void write_montecarlo_outputs(const ExperimentConfig& cfg,
                              const MonteCarloReport& report,
                              const std::string& dir) {
  std::ofstream csv = open_output(dir, "montecarlo.csv");
  write_provenance(csv, cfg);
  csv << "phase_index,row,col,xi,ensemble_cov,z\n";
  for (const MonteCarloPhaseReport& ph : report.phases)
    for (int r = 0; r < 4; ++r)
      for (int c = r; c < 4; ++c)
        csv << ph.phase_index << "," << r << "," << c << ","
            << fmt(ph.xi(r, c)) << "," << fmt(ph.ensemble_cov(r, c)) << ","
            << fmt(ph.z_scores(r, c)) << "\n";

  nlohmann::json summary;
  summary["mode"] = "montecarlo";
  for (const auto& [k, v] : cfg.provenance()) summary["config"][k] = v;
  summary["n_trajectories"] = report.n_trajectories;
  summary["pass"] = report.pass;
  nlohmann::json phases = nlohmann::json::array();
  for (const MonteCarloPhaseReport& ph : report.phases)
    phases.push_back(
        {{"phase_index", ph.phase_index}, {"max_abs_z", ph.max_abs_z}});
  summary["phases"] = phases;
  std::ofstream json_out = open_output(dir, "montecarlo_summary.json");
  json_out << summary.dump(2) << "\n";
}

void write_solve_outputs(const ExperimentConfig& cfg, const SolveDump& dump,
                         const std::string& dir) {
  std::ofstream csv = open_output(dir, "solve.csv");
  write_provenance(csv, cfg);
  csv << "t";
  const char* names[4] = {"x1", "p1", "x2", "p2"};
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c)
      csv << ",sigma_c_" << names[r] << names[c];
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c) csv << ",xi_" << names[r] << names[c];
  csv << ",e_n_c,e_n_u\n";
  for (std::size_t i = 0; i < dump.trace.times.size(); ++i) {
    csv << fmt(dump.trace.times[i]);
    for (int r = 0; r < 4; ++r)
      for (int c = r; c < 4; ++c) csv << "," << fmt(dump.sol.sigma_c[i](r, c));
    for (int r = 0; r < 4; ++r)
      for (int c = r; c < 4; ++c) csv << "," << fmt(dump.xi[i](r, c));
    csv << "," << fmt(dump.trace.e_n_c[i]) << "," << fmt(dump.trace.e_n_u[i])
        << "\n";
  }
}

void dump_trajectories(const ExperimentConfig& cfg, std::size_t n,
                       const std::string& path) {
  const ModelMatrices m = build_model(cfg.params, cfg.overrides);
  const PeriodicSolution sol = solve_periodic(cfg.params, m, cfg.solver);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_provenance(out, cfg);
  out << "trajectory,step,t,x1,p1,x2,p2\n";
  for (std::size_t traj = 0; traj < n; ++traj) {
    const Trajectory tr = simulate_trajectory(
        cfg.params, m, sol, stream_seed(cfg.seed, traj),
        cfg.montecarlo.burn_in_periods + 1, cfg.montecarlo.substeps);
    for (std::size_t s = 0; s < tr.samples.size(); ++s)
      out << traj << "," << s << "," << fmt(s * tr.dt) << ","
          << fmt(tr.samples[s](0)) << "," << fmt(tr.samples[s](1)) << ","
          << fmt(tr.samples[s](2)) << "," << fmt(tr.samples[s](3)) << "\n";
  }
}

}  // namespace entgen
