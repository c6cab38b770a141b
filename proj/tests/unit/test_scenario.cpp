#include <doctest.h>

#include "pensim/io.hpp"
#include "pensim/rng.hpp"
#include "pensim/scenario.hpp"

using namespace pensim;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("the built-in defaults validate and carry the standard calibration") {
  const Scenario s = default_scenario();
  CHECK_NOTHROW(validate_scenario(s));
  CHECK(s.config.population.entry.growth_rate == -0.005);
  CHECK(s.config.population.mortality.makeham_base == 1.124);
  CHECK(s.config.population.mortality.base_hazard == 0.000022);
  CHECK(s.config.population.mortality.makeham_scale == 2.7e-6);
  CHECK(s.config.population.mortality.longevity_period == 4.0);
  CHECK(s.config.population.entry_age == 25.0);
  CHECK(s.config.population.retirement_age == 65.0);
  CHECK(s.config.population.entry.initial_density == 10.0);
  CHECK(s.config.rules.initial_fund == 3000.0);
  CHECK(s.config.rules.horizon == 20.0);
  CHECK(s.config.population.frontier.initial_max_age == 100.0);
  CHECK(s.config.rules.contribution_target == 0.1);
  CHECK(s.config.rules.benefit_target == 0.7);
  CHECK(s.config.rules.target_growth_rate == 0.02);
  CHECK(s.config.weights.contribution_weight == 2.0);
  CHECK(s.config.weights.benefit_weight == 2.0);
  CHECK(s.config.weights.discontinuity_weight == 2.0);
  CHECK(s.config.market.risk_free_rate == 0.01);
  CHECK(s.config.market.risky_drift == 0.05);
  CHECK(s.config.market.risky_volatility == 0.15);
  CHECK(s.config.weights.ambiguity_aversion == 2.0);
  CHECK(s.config.population.frontier.expansion_rate == 0.25);
  CHECK(s.sim.steps == 1000);
  CHECK(s.sim.paths == 1000);
}

TEST_CASE("missing keys fall back to defaults with a notice") {
  const auto loaded = parse_scenario(R"({"kappa": -0.01, "seed": 7})");
  CHECK(loaded.scenario.config.population.entry.growth_rate == -0.01);
  CHECK(loaded.scenario.sim.seed == 7);
  CHECK(loaded.scenario.config.rules.horizon == 20.0);
  CHECK(loaded.notices.size() > 10);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"kapa": -0.01})"), doctest::Contains("unknown key"),
                       std::invalid_argument);
}

TEST_CASE("malformed text is a parse error") {
  CHECK_THROWS_WITH_AS(parse_scenario("{"), doctest::Contains("parse error"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario("[1,2]"), std::invalid_argument);
}

TEST_CASE("constraint violations are reported together with their source") {
  auto loaded = parse_scenario(R"({"mu": 0.01, "r": 0.01, "k": 0.5})");
  try {
    validate_scenario(loaded.scenario);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("no-arbitrage") != std::string::npos);
    CHECK(msg.find("singular") != std::string::npos);
    CHECK(msg.find("2 violation") != std::string::npos);
  }
}

TEST_CASE("enumerated keys parse and reject unknown labels") {
  auto loaded = parse_scenario(R"({"measure": "worst-case", "phi_star_form": "foc-derived",
                                   "liability_discount": "to-time-zero"})");
  CHECK(loaded.scenario.sim.measure == Measure::WorstCase);
  CHECK(loaded.scenario.config.distortion_form == DriftDistortionForm::FocDerived);
  CHECK(loaded.scenario.config.liability_discount == LiabilityDiscount::ToTimeZero);
  CHECK_THROWS_AS(parse_scenario(R"({"measure": "sideways"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario(R"({"phi_star_form": "guess"})"), std::invalid_argument);
}

TEST_CASE("randomized scenarios survive the emit/parse round trip") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Scenario s = default_scenario();
    auto draw = [&](std::uint64_t lane) { return uniform01(counter_bits(5, trial, 0, lane)); };
    s.config.population.entry.growth_rate = 0.04 * (draw(0) - 0.5);
    s.config.population.mortality.longevity_period = 2.0 + 30.0 * draw(1);
    s.config.rules.horizon = 5.0 + 30.0 * draw(2);
    s.config.market.risky_volatility = 0.05 + 0.3 * draw(3);
    s.sim.seed = counter_bits(5, trial, 1, 0);
    const auto loaded = parse_scenario(emit_scenario(s));
    CHECK(loaded.notices.empty());
    CHECK(emit_scenario(loaded.scenario) == emit_scenario(s));
    CHECK(loaded.scenario.config.rules.horizon == s.config.rules.horizon);
    CHECK(loaded.scenario.sim.seed == s.sim.seed);
  }
}

TEST_CASE("emit and parse round-trip is the identity") {
  Scenario s = default_scenario();
  s.config.population.entry.growth_rate = -0.0123;
  s.sim.seed = 987654321;
  s.sim.measure = Measure::WorstCase;
  s.out_dir = "artifacts";
  const std::string text = emit_scenario(s);
  const auto loaded = parse_scenario(text);
  CHECK(loaded.notices.empty());
  CHECK(emit_scenario(loaded.scenario) == text);
  CHECK(loaded.scenario.config.population.entry.growth_rate == -0.0123);
  CHECK(loaded.scenario.sim.seed == 987654321);
  CHECK(loaded.scenario.out_dir == "artifacts");
}

TEST_CASE("formatting and hashing helpers") {
  CHECK(format_g12(0.1) == "0.1");
  CHECK(format_g12(1.0 / 3.0) == "0.333333333333");
  CHECK(format_g12(474192.8298) == "474192.8298");
  // Reference vector for 64-bit FNV-1a.
  CHECK(hex64(fnv1a64("abc")) == "e71fa2190541574b");
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("manifest serialization carries artifacts and the resolved scenario") {
  RunManifest manifest;
  manifest.tool_version = "0.0.0";
  manifest.command = "simulate";
  manifest.seed = 42;
  manifest.created_utc = "2025-01-01T00:00:00Z";
  manifest.scenario = emit_scenario(default_scenario());
  manifest.artifacts.push_back({"summary.csv", hex64(fnv1a64("abc"))});
  const std::string text = to_json(manifest);
  CHECK(text.find("summary.csv") != std::string::npos);
  CHECK(text.find("e71fa2190541574b") != std::string::npos);
  CHECK(text.find("fnv1a64") != std::string::npos);
  CHECK(text.find("\"kappa\"") != std::string::npos);
}

TEST_SUITE_END();
