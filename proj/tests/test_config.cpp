#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entgen/config.hpp"

using namespace entgen;

TEST_CASE("empty input is rejected with a useful message") {
  CHECK_THROWS_WITH_AS(parse_config_text(""),
                       doctest::Contains("parse error"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("{}"),
                       doctest::Contains("params"), std::runtime_error);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"params": {"g0": 0.2, "gamma_ba": 0.05,
        "gamma_th": 0.0025, "eta": 1, "q": 0.1, "bogus": 3}})"),
      doctest::Contains("bogus"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"params": {"g0": 0.2, "gamma_ba": 0.05,
        "gamma_th": 0.0025, "eta": 1, "q": 0.1}, "extra": {}})"),
      doctest::Contains("extra"), std::runtime_error);
}

TEST_CASE("range violations are rejected") {
  CHECK_THROWS_AS(
      parse_config_text(R"({"params": {"g0": 0.2, "gamma_ba": 0.05,
        "gamma_th": 0.0025, "eta": 1.5, "q": 0.1}})"),
      std::exception);
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"params": {"g0": 0.2, "gamma_ba": 0.05,
        "gamma_th": 0.0025, "eta": 1, "q": 0.1},
        "solver": {"n_steps": 100}})"),
      doctest::Contains("n_steps"), std::runtime_error);
}

TEST_CASE("shipped reference config parses to the caption parameter set") {
  const ExperimentConfig cfg = parse_config(CONFIG_DIR "/fig2_map.json");
  CHECK(cfg.params.g0 == doctest::Approx(0.2));
  CHECK(cfg.params.gamma_ba == doctest::Approx(0.05));
  CHECK(cfg.params.gamma_th == doctest::Approx(0.05 * 0.05));  // 0.05*Gamma_ba
  CHECK(cfg.params.q == doctest::Approx(0.1));
  CHECK(cfg.params.eta == doctest::Approx(1.0));
  CHECK(cfg.params.phi == doctest::Approx(M_PI));
  REQUIRE(cfg.map.has_value());
  CHECK(cfg.map->g1.count == 60);
  CHECK(cfg.map->omega.count == 60);
  CHECK(cfg.map->g1.start == 0.0);
  CHECK(cfg.map->g1.stop == doctest::Approx(0.2));
  CHECK(cfg.map->omega.start == doctest::Approx(1.5));
  CHECK(cfg.map->omega.stop == doctest::Approx(3.5));
  REQUIRE(cfg.mode.has_value());
  CHECK(*cfg.mode == Mode::map);
}

TEST_CASE("axis values: linear and log spacing") {
  AxisSpec lin{0.0, 1.0, 5, false};
  const auto lv = lin.values();
  REQUIRE(lv.size() == 5);
  CHECK(lv[1] == doctest::Approx(0.25));
  CHECK(lv.back() == doctest::Approx(1.0));
  AxisSpec lg{1.0, 100.0, 3, true};
  const auto gv = lg.values();
  CHECK(gv[1] == doctest::Approx(10.0));
  AxisSpec single{2.5, 99.0, 1, false};
  REQUIRE(single.values().size() == 1);
  CHECK(single.values()[0] == doctest::Approx(2.5));
}

TEST_CASE("boundary spec: g1_ratio and fixed g1 are mutually exclusive") {
  const std::string base = R"("params": {"g0": 0.2, "gamma_ba": 0.05,
    "gamma_th": 0.0025, "eta": 1, "q": 0.1})";
  CHECK_THROWS_WITH_AS(
      parse_config_text("{" + base + R"(, "boundary": {
        "g0": {"start": 0.02, "stop": 0.2, "count": 5},
        "g1_ratio": 0.2, "g1": 0.05}})"),
      doctest::Contains("mutually exclusive"), std::runtime_error);
  const auto cfg = parse_config_text("{" + base + R"(, "boundary": {
    "g0": {"start": 0.02, "stop": 0.2, "count": 5}, "g1_ratio": 0.2}})");
  REQUIRE(cfg.boundary.has_value());
  CHECK(cfg.boundary->g1_ratio == 0.2);
  CHECK_FALSE(cfg.boundary->g1_fixed.has_value());
  CHECK(cfg.boundary->eta.size() == 4);  // documented default slices
}

TEST_CASE("matrix overrides parse shape-checked") {
  const std::string base = R"("params": {"g0": 0.2, "gamma_ba": 0.05,
    "gamma_th": 0.0025, "eta": 1, "q": 0.1})";
  const auto cfg = parse_config_text("{" + base + R"(, "matrices": {
    "W": [[2, 0], [0, 2]]}})");
  REQUIRE(cfg.overrides.W.has_value());
  CHECK((*cfg.overrides.W - 2.0 * Mat2::Identity()).norm() == 0.0);
  CHECK_THROWS_WITH_AS(
      parse_config_text("{" + base + R"(, "matrices": {"W": [[2, 0]]}})"),
      doctest::Contains("rows"), std::runtime_error);
}

TEST_CASE("provenance echoes the resolved configuration") {
  const auto cfg = parse_config_text(R"({"seed": 7, "params": {"g0": 0.2,
    "gamma_ba": 0.05, "gamma_th": 0.0025, "eta": 1, "q": 0.1}})");
  const auto kv = cfg.provenance();
  bool saw_seed = false, saw_g0 = false, saw_tol = false;
  for (const auto& [k, v] : kv) {
    if (k == "seed") saw_seed = (v == "7");
    if (k == "params.g0") saw_g0 = true;
    if (k == "solver.tol_periodic") saw_tol = true;
  }
  CHECK(saw_seed);
  CHECK(saw_g0);
  CHECK(saw_tol);
}
