#include "pensim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pensim/io.hpp"
#include "pensim/version.hpp"

namespace pensim {

using nlohmann::json;

Scenario default_scenario() {
  Scenario s;
  s.config.population.mortality = {0.000022, 2.7e-6, 1.124, 4.0, true};
  s.config.population.frontier = {100.0, 0.25};
  s.config.population.entry = {10.0, -0.005};
  s.config.population.entry_age = 25.0;
  s.config.population.retirement_age = 65.0;
  s.config.market = {0.01, 0.05, 0.15};
  s.config.rules = {0.1, 0.7, 0.02, 3000.0, 20.0};
  s.config.weights = {2.0, 2.0, 2.0, 2.0};
  s.sim = {};
  s.out_dir = "out";
  return s;
}

namespace {

struct KeyReader {
  const json& j;
  std::vector<std::string>* notices;
  std::set<std::string> seen;

  template <typename T>
  T get(const char* key, T fallback) {
    seen.insert(key);
    if (!j.contains(key)) {
      if (notices) notices->push_back(std::string("key '") + key + "' missing, using default");
      return fallback;
    }
    return j.at(key).get<T>();
  }
};

std::string measure_name(Measure m) {
  return m == Measure::Reference ? "reference" : "worst-case";
}
Measure measure_from(const std::string& name) {
  if (name == "reference") return Measure::Reference;
  if (name == "worst-case") return Measure::WorstCase;
  throw std::invalid_argument("scenario: measure must be 'reference' or 'worst-case'");
}

std::string distortion_name(DriftDistortionForm f) {
  return f == DriftDistortionForm::AsPrinted ? "as-printed" : "foc-derived";
}
DriftDistortionForm distortion_from(const std::string& name) {
  if (name == "as-printed") return DriftDistortionForm::AsPrinted;
  if (name == "foc-derived") return DriftDistortionForm::FocDerived;
  throw std::invalid_argument("scenario: phi_star_form must be 'as-printed' or 'foc-derived'");
}

std::string discount_name(LiabilityDiscount d) {
  return d == LiabilityDiscount::AsPrinted ? "as-printed" : "to-time-zero";
}
LiabilityDiscount discount_from(const std::string& name) {
  if (name == "as-printed") return LiabilityDiscount::AsPrinted;
  if (name == "to-time-zero") return LiabilityDiscount::ToTimeZero;
  throw std::invalid_argument("scenario: liability_discount must be 'as-printed' or 'to-time-zero'");
}

}  // namespace

ScenarioLoad parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");

  ScenarioLoad out;
  Scenario defaults = default_scenario();
  Scenario& s = out.scenario;
  KeyReader reader{j, &out.notices, {}};

  auto& pop = s.config.population;
  pop.mortality.base_hazard = reader.get("A", defaults.config.population.mortality.base_hazard);
  pop.mortality.makeham_scale = reader.get("B", defaults.config.population.mortality.makeham_scale);
  pop.mortality.makeham_base = reader.get("theta", defaults.config.population.mortality.makeham_base);
  pop.mortality.longevity_period =
      reader.get("omega", defaults.config.population.mortality.longevity_period);
  pop.mortality.longevity_trend =
      reader.get("longevity_trend", defaults.config.population.mortality.longevity_trend);
  pop.frontier.initial_max_age = reader.get("m0", defaults.config.population.frontier.initial_max_age);
  pop.frontier.expansion_rate = reader.get("xi", defaults.config.population.frontier.expansion_rate);
  pop.entry.initial_density = reader.get("n0", defaults.config.population.entry.initial_density);
  pop.entry.growth_rate = reader.get("kappa", defaults.config.population.entry.growth_rate);
  pop.entry_age = reader.get("x0", defaults.config.population.entry_age);
  pop.retirement_age = reader.get("xr", defaults.config.population.retirement_age);

  s.config.market.risk_free_rate = reader.get("r", defaults.config.market.risk_free_rate);
  s.config.market.risky_drift = reader.get("mu", defaults.config.market.risky_drift);
  s.config.market.risky_volatility = reader.get("sigma", defaults.config.market.risky_volatility);

  s.config.rules.contribution_target = reader.get("c", defaults.config.rules.contribution_target);
  s.config.rules.benefit_target = reader.get("b", defaults.config.rules.benefit_target);
  s.config.rules.target_growth_rate = reader.get("tau", defaults.config.rules.target_growth_rate);
  s.config.rules.initial_fund = reader.get("a0", defaults.config.rules.initial_fund);
  s.config.rules.horizon = reader.get("T", defaults.config.rules.horizon);

  s.config.weights.contribution_weight = reader.get("gamma1", defaults.config.weights.contribution_weight);
  s.config.weights.benefit_weight = reader.get("gamma2", defaults.config.weights.benefit_weight);
  s.config.weights.discontinuity_weight =
      reader.get("gamma3", defaults.config.weights.discontinuity_weight);
  s.config.weights.ambiguity_aversion = reader.get("k", defaults.config.weights.ambiguity_aversion);

  s.config.distortion_form =
      distortion_from(reader.get<std::string>("phi_star_form", distortion_name(defaults.config.distortion_form)));
  s.config.liability_discount = discount_from(
      reader.get<std::string>("liability_discount", discount_name(defaults.config.liability_discount)));

  s.sim.steps = reader.get<std::size_t>("steps", defaults.sim.steps);
  s.sim.paths = reader.get<std::size_t>("paths", defaults.sim.paths);
  s.sim.seed = reader.get<std::uint64_t>("seed", defaults.sim.seed);
  s.sim.measure = measure_from(reader.get<std::string>("measure", measure_name(defaults.sim.measure)));
  s.sim.threads = reader.get<unsigned>("threads", defaults.sim.threads);
  s.sim.overflow_guard = reader.get("overflow_guard", defaults.sim.overflow_guard);
  s.out_dir = reader.get<std::string>("out_dir", defaults.out_dir);

  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!reader.seen.count(it.key())) {
      throw std::invalid_argument("scenario: unknown key '" + it.key() + "'");
    }
  }
  return out;
}

ScenarioLoad load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string emit_scenario(const Scenario& s) {
  json j;
  const auto& pop = s.config.population;
  j["A"] = pop.mortality.base_hazard;
  j["B"] = pop.mortality.makeham_scale;
  j["theta"] = pop.mortality.makeham_base;
  j["omega"] = pop.mortality.longevity_period;
  j["longevity_trend"] = pop.mortality.longevity_trend;
  j["m0"] = pop.frontier.initial_max_age;
  j["xi"] = pop.frontier.expansion_rate;
  j["n0"] = pop.entry.initial_density;
  j["kappa"] = pop.entry.growth_rate;
  j["x0"] = pop.entry_age;
  j["xr"] = pop.retirement_age;
  j["r"] = s.config.market.risk_free_rate;
  j["mu"] = s.config.market.risky_drift;
  j["sigma"] = s.config.market.risky_volatility;
  j["c"] = s.config.rules.contribution_target;
  j["b"] = s.config.rules.benefit_target;
  j["tau"] = s.config.rules.target_growth_rate;
  j["a0"] = s.config.rules.initial_fund;
  j["T"] = s.config.rules.horizon;
  j["gamma1"] = s.config.weights.contribution_weight;
  j["gamma2"] = s.config.weights.benefit_weight;
  j["gamma3"] = s.config.weights.discontinuity_weight;
  j["k"] = s.config.weights.ambiguity_aversion;
  j["phi_star_form"] = distortion_name(s.config.distortion_form);
  j["liability_discount"] = discount_name(s.config.liability_discount);
  j["steps"] = s.sim.steps;
  j["paths"] = s.sim.paths;
  j["seed"] = s.sim.seed;
  j["measure"] = measure_name(s.sim.measure);
  j["threads"] = s.sim.threads;
  j["overflow_guard"] = s.sim.overflow_guard;
  j["out_dir"] = s.out_dir;
  return j.dump(2);
}

void validate_scenario(const Scenario& scenario) {
  std::vector<std::string> reasons = scenario.config.violations();
  try {
    scenario.sim.validate();
  } catch (const std::exception& e) {
    reasons.emplace_back(e.what());
  }
  if (reasons.empty()) return;
  std::ostringstream oss;
  oss << "invalid scenario (" << reasons.size() << " violation(s)):";
  for (const auto& reason : reasons) oss << "\n  - " << reason;
  throw std::invalid_argument(oss.str());
}

std::string to_json(const RunManifest& manifest) {
  json j;
  j["tool_version"] = manifest.tool_version;
  j["command"] = manifest.command;
  j["seed"] = manifest.seed;
  j["created_utc"] = manifest.created_utc;
  j["scenario"] = json::parse(manifest.scenario);
  j["hash_algorithm"] = "fnv1a64";
  j["artifacts"] = json::array();
  for (const auto& entry : manifest.artifacts) {
    j["artifacts"].push_back({{"path", entry.path}, {"hash", entry.hash}});
  }
  return j.dump(2);
}

}  // namespace pensim
