#include "entgen/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace entgen {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error("config error at '" + where + "': " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) fail(where, "unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const std::string& where, const char* key,
                  double fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) fail(where, std::string("missing required key '") + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

template <typename Matrix>
Matrix get_matrix(const json& value, const std::string& where) {
  Matrix m;
  if (!value.is_array() || static_cast<int>(value.size()) != m.rows())
    fail(where, "expected " + std::to_string(m.rows()) + " rows");
  for (int r = 0; r < m.rows(); ++r) {
    const json& row = value[r];
    if (!row.is_array() || static_cast<int>(row.size()) != m.cols())
      fail(where, "expected " + std::to_string(m.cols()) + " columns");
    for (int c = 0; c < m.cols(); ++c) {
      if (!row[c].is_number()) fail(where, "expected numeric entries");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

AxisSpec parse_axis(const json& obj, const std::string& where) {
  check_keys(obj, where, {"start", "stop", "count", "scale"});
  AxisSpec ax;
  ax.start = get_number(obj, where, "start", 0.0, true);
  ax.stop = get_number(obj, where, "stop", 0.0, true);
  const double count = get_number(obj, where, "count", 1.0, true);
  ax.count = static_cast<int>(count);
  if (ax.count < 1 || ax.count != count) fail(where + ".count", "must be an integer >= 1");
  if (obj.contains("scale")) {
    const std::string scale = obj["scale"].get<std::string>();
    if (scale == "log")
      ax.log_scale = true;
    else if (scale != "linear")
      fail(where + ".scale", "must be 'linear' or 'log'");
  }
  if (ax.log_scale && !(ax.start > 0.0 && ax.stop > 0.0))
    fail(where, "log axis requires positive endpoints");
  return ax;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::solve: return "solve";
    case Mode::map: return "map";
    case Mode::boundary: return "boundary";
    case Mode::trace: return "trace";
    case Mode::montecarlo: return "montecarlo";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "solve") return Mode::solve;
  if (name == "map") return Mode::map;
  if (name == "boundary") return Mode::boundary;
  if (name == "trace") return Mode::trace;
  if (name == "montecarlo") return Mode::montecarlo;
  throw std::runtime_error("unknown mode '" + name + "'");
}

std::vector<double> AxisSpec::values() const {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = start;
    return v;
  }
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    v[i] = log_scale ? start * std::pow(stop / start, f)
                     : start + f * (stop - start);
  }
  return v;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  check_keys(root, "<root>",
             {"mode", "seed", "params", "solver", "matrices", "map",
              "boundary", "montecarlo", "output"});

  ExperimentConfig cfg;
  if (root.contains("mode"))
    cfg.mode = mode_from_string(root["mode"].get<std::string>());
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned())
      fail("seed", "expected an unsigned integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  if (!root.contains("params"))
    fail("<root>", "missing required key 'params'");
  {
    const json& p = root["params"];
    const std::string where = "params";
    check_keys(p, where,
               {"omega0", "g0", "g1", "omega", "gamma", "gamma_ba", "gamma_th",
                "eta", "q", "phi"});
    SystemParams& sp = cfg.params;
    sp.omega0 = get_number(p, where, "omega0", sp.omega0);
    sp.g0 = get_number(p, where, "g0", sp.g0, true);
    sp.g1 = get_number(p, where, "g1", sp.g1);
    sp.omega_mod = get_number(p, where, "omega", sp.omega_mod);
    sp.gamma = get_number(p, where, "gamma", sp.gamma);
    sp.gamma_ba = get_number(p, where, "gamma_ba", sp.gamma_ba, true);
    sp.gamma_th = get_number(p, where, "gamma_th", sp.gamma_th, true);
    sp.eta = get_number(p, where, "eta", sp.eta, true);
    sp.q = get_number(p, where, "q", sp.q, true);
    sp.phi = get_number(p, where, "phi", sp.phi);
    try {
      sp.validate();
    } catch (const std::exception& e) {
      fail(where, e.what());
    }
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    const std::string where = "solver";
    check_keys(s, where,
               {"n_steps", "tol_periodic", "min_periods", "max_periods",
                "overflow_limit", "cond_limit", "clamp_average"});
    SolverOptions& so = cfg.solver;
    so.n_steps = static_cast<int>(get_number(s, where, "n_steps", so.n_steps));
    so.tol_periodic = get_number(s, where, "tol_periodic", so.tol_periodic);
    so.min_periods = static_cast<int>(get_number(s, where, "min_periods", so.min_periods));
    so.max_periods = static_cast<int>(get_number(s, where, "max_periods", so.max_periods));
    so.overflow_limit = get_number(s, where, "overflow_limit", so.overflow_limit);
    so.cond_limit = get_number(s, where, "cond_limit", so.cond_limit);
    if (s.contains("clamp_average")) {
      if (!s["clamp_average"].is_boolean()) fail(where + ".clamp_average", "expected a boolean");
      cfg.clamp_average = s["clamp_average"].get<bool>();
    }
    if (so.n_steps < 256 || so.n_steps % 2 != 0)
      fail(where + ".n_steps", "must be an even integer >= 256");
    if (!(so.tol_periodic > 0.0)) fail(where + ".tol_periodic", "must be > 0");
  }

  if (root.contains("matrices")) {
    const json& m = root["matrices"];
    check_keys(m, "matrices", {"C", "W", "M", "V"});
    if (m.contains("C")) cfg.overrides.C = get_matrix<Mat24>(m["C"], "matrices.C");
    if (m.contains("W")) cfg.overrides.W = get_matrix<Mat2>(m["W"], "matrices.W");
    if (m.contains("M")) cfg.overrides.M = get_matrix<Mat42>(m["M"], "matrices.M");
    if (m.contains("V")) cfg.overrides.V = get_matrix<Mat4>(m["V"], "matrices.V");
  }

  if (root.contains("map")) {
    const json& m = root["map"];
    check_keys(m, "map", {"g1", "omega"});
    if (!m.contains("g1") || !m.contains("omega"))
      fail("map", "requires 'g1' and 'omega' axes");
    MapSpec spec;
    spec.g1 = parse_axis(m["g1"], "map.g1");
    spec.omega = parse_axis(m["omega"], "map.omega");
    cfg.map = spec;
  }

  if (root.contains("boundary")) {
    const json& b = root["boundary"];
    const std::string where = "boundary";
    check_keys(b, where,
               {"g0", "g1_ratio", "g1", "eta", "omega_points", "omega_window",
                "bisect_tol"});
    BoundarySpec spec;
    if (!b.contains("g0")) fail(where, "requires a 'g0' axis");
    spec.g0 = parse_axis(b["g0"], "boundary.g0");
    if (b.contains("g1_ratio")) spec.g1_ratio = get_number(b, where, "g1_ratio", 0.0);
    if (b.contains("g1")) spec.g1_fixed = get_number(b, where, "g1", 0.0);
    if (!spec.g1_ratio && !spec.g1_fixed)
      fail(where, "requires 'g1_ratio' or 'g1'");
    if (spec.g1_ratio && spec.g1_fixed)
      fail(where, "'g1_ratio' and 'g1' are mutually exclusive");
    if (b.contains("eta")) {
      spec.eta.clear();
      for (const auto& e : b["eta"]) {
        if (!e.is_number()) fail(where + ".eta", "expected numbers");
        spec.eta.push_back(e.get<double>());
      }
      if (spec.eta.empty()) fail(where + ".eta", "must not be empty");
    }
    spec.omega_points = static_cast<int>(get_number(b, where, "omega_points", spec.omega_points));
    if (spec.omega_points < 3) fail(where + ".omega_points", "must be >= 3");
    if (b.contains("omega_window")) {
      const json& w = b["omega_window"];
      if (!w.is_array() || w.size() != 2) fail(where + ".omega_window", "expected [lo, hi]");
      spec.window_lo = w[0].get<double>();
      spec.window_hi = w[1].get<double>();
      if (!(spec.window_lo > 0.0 && spec.window_hi > spec.window_lo))
        fail(where + ".omega_window", "requires 0 < lo < hi");
    }
    spec.bisect_tol = get_number(b, where, "bisect_tol", spec.bisect_tol);
    cfg.boundary = spec;
  }

  if (root.contains("montecarlo")) {
    const json& m = root["montecarlo"];
    const std::string where = "montecarlo";
    check_keys(m, where,
               {"n_trajectories", "burn_in_periods", "substeps", "n_phases"});
    MonteCarloSpec& mc = cfg.montecarlo;
    mc.n_trajectories = static_cast<std::size_t>(
        get_number(m, where, "n_trajectories", static_cast<double>(mc.n_trajectories)));
    mc.burn_in_periods = static_cast<int>(get_number(m, where, "burn_in_periods", mc.burn_in_periods));
    mc.substeps = static_cast<int>(get_number(m, where, "substeps", mc.substeps));
    mc.n_phases = static_cast<int>(get_number(m, where, "n_phases", mc.n_phases));
    if (mc.n_trajectories < 2) fail(where + ".n_trajectories", "must be >= 2");
    if (mc.burn_in_periods < 0) fail(where + ".burn_in_periods", "must be >= 0");
    if (mc.substeps < 1) fail(where + ".substeps", "must be >= 1");
    if (mc.n_phases < 1) fail(where + ".n_phases", "must be >= 1");
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    check_keys(o, "output", {"dir"});
    if (o.contains("dir")) cfg.output.dir = o["dir"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::provenance()
    const {
  std::vector<std::pair<std::string, std::string>> kv;
  if (mode) kv.emplace_back("mode", to_string(*mode));
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("params.omega0", fmt(params.omega0));
  kv.emplace_back("params.g0", fmt(params.g0));
  kv.emplace_back("params.g1", fmt(params.g1));
  kv.emplace_back("params.omega", fmt(params.omega_mod));
  kv.emplace_back("params.gamma", fmt(params.gamma));
  kv.emplace_back("params.gamma_ba", fmt(params.gamma_ba));
  kv.emplace_back("params.gamma_th", fmt(params.gamma_th));
  kv.emplace_back("params.eta", fmt(params.eta));
  kv.emplace_back("params.q", fmt(params.q));
  kv.emplace_back("params.phi", fmt(params.phi));
  kv.emplace_back("solver.n_steps", std::to_string(solver.n_steps));
  kv.emplace_back("solver.tol_periodic", fmt(solver.tol_periodic));
  kv.emplace_back("solver.min_periods", std::to_string(solver.min_periods));
  kv.emplace_back("solver.max_periods", std::to_string(solver.max_periods));
  kv.emplace_back("solver.overflow_limit", fmt(solver.overflow_limit));
  kv.emplace_back("solver.cond_limit", fmt(solver.cond_limit));
  kv.emplace_back("solver.clamp_average", clamp_average ? "true" : "false");
  kv.emplace_back("matrices.overridden",
                  (overrides.C || overrides.W || overrides.M || overrides.V)
                      ? "true"
                      : "false");
  return kv;
}

}  // namespace entgen
