// Batch front end: scenario ingestion, demography dumps, liability and policy
// evaluation, verification reports, Monte Carlo runs, sweeps, and the CSV
// packs behind the standard plots.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pensim/io.hpp"
#include "pensim/scenario.hpp"
#include "pensim/verify.hpp"
#include "pensim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pensim;

namespace {

double round12(double v) { return std::stod(format_g12(v)); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects artifacts, hashes them into the manifest, and removes partial
// output if the command fails midway.
class ArtifactWriter {
 public:
  ArtifactWriter(fs::path dir, std::string command, const Scenario& scenario)
      : dir_(std::move(dir)) {
    manifest_.tool_version = kVersion;
    manifest_.command = std::move(command);
    manifest_.seed = scenario.sim.seed;
    manifest_.created_utc = utc_now();
    manifest_.scenario = emit_scenario(scenario);
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write artifact: " + path.string());
    out << content;
    out.close();
    written_.push_back(path);
    manifest_.artifacts.push_back({name, hex64(fnv1a64(content))});
  }

  void finalize() {
    const fs::path path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << to_json(manifest_) << '\n';
  }

  void remove_partial_outputs() {
    for (const auto& path : written_) {
      std::error_code ec;
      fs::remove(path, ec);
    }
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
  std::vector<fs::path> written_;
};

std::string life_table_csv(const PlanConfig& config, double age_step) {
  std::ostringstream oss;
  oss << "age,t,hazard,survival\n";
  const auto& pop = config.population;
  const double T = config.rules.horizon;
  for (int ti = 0; ti <= 10; ++ti) {
    const double t = T * static_cast<double>(ti) / 10.0;
    for (double age = pop.entry_age; age <= pop.frontier.max_age(t) + 1e-9; age += age_step) {
      oss << format_g12(age) << ',' << format_g12(t) << ','
          << format_g12(hazard(pop.mortality, age, t)) << ','
          << format_g12(survival(pop, age, t)) << '\n';
    }
  }
  return oss.str();
}

json decision_json(const ControlDecision& d, const FundState& state, double liability) {
  json j;
  j["t"] = round12(state.time);
  j["a"] = round12(state.assets);
  j["phi_star"] = round12(d.drift_distortion);
  j["pi_star"] = round12(d.risky_investment);
  j["lambda1_star"] = round12(d.contribution_adjustment);
  j["lambda2_star"] = round12(d.benefit_adjustment);
  j["c_star"] = round12(d.contribution);
  j["b_star"] = round12(d.benefit);
  j["surplus"] = round12(state.assets - liability);
  if (d.spread.defined) {
    j["alpha"] = round12(d.spread.contribution);
    j["beta"] = round12(d.spread.benefit);
  } else {
    j["alpha"] = nullptr;
    j["beta"] = nullptr;
  }
  return j;
}

std::size_t index_at_time(const SimulationSummary& summary, double t) {
  std::size_t best = 0;
  double best_gap = std::abs(summary.time.front() - t);
  for (std::size_t i = 1; i < summary.time.size(); ++i) {
    const double gap = std::abs(summary.time[i] - t);
    if (gap < best_gap) {
      best = i;
      best_gap = gap;
    }
  }
  return best;
}

std::string spread_csv(const SimulationSummary& summary) {
  std::ostringstream oss;
  oss << "t,alpha,beta\n";
  for (std::size_t i = 0; i < summary.time.size(); ++i) {
    oss << format_g12(summary.time[i]) << ','
        << format_g12(summary.mean_spread_contribution[i]) << ','
        << format_g12(summary.mean_spread_benefit[i]) << '\n';
  }
  return oss.str();
}

std::string trajectory_block(const std::string& label_value, const SimulationSummary& summary) {
  std::ostringstream oss;
  for (std::size_t i = 0; i < summary.time.size(); ++i) {
    oss << label_value << ',' << format_g12(summary.time[i]) << ','
        << format_g12(summary.contribution.mean[i]) << ',' << format_g12(summary.benefit.mean[i])
        << ',' << format_g12(summary.invest_fraction.mean[i]) << ','
        << format_g12(summary.assets.mean[i]) << '\n';
  }
  return oss.str();
}

int run_command(const std::string& command, Scenario scenario, double policy_t, double policy_a,
                const std::string& sweep_parameter, const std::vector<double>& sweep_values,
                double life_table_age_step) {
  validate_scenario(scenario);
  ArtifactWriter writer(scenario.out_dir, command, scenario);
  int exit_code = 0;

  try {
    if (command == "life-table") {
      writer.write("life_table.csv", life_table_csv(scenario.config, life_table_age_step));
    } else if (command == "liability") {
      const double L = target_liability(scenario.config);
      json j;
      j["L"] = round12(L);
      j["liability_discount"] =
          scenario.config.liability_discount == LiabilityDiscount::AsPrinted ? "as-printed"
                                                                             : "to-time-zero";
      writer.write("liability.json", j.dump(2) + "\n");
      std::cout << "L = " << format_g12(L) << '\n';
    } else if (command == "policy-at") {
      const double L = target_liability(scenario.config);
      const FundState state{policy_t, policy_a};
      const auto decision = realized_policy(scenario.config, state, L);
      const std::string text = decision_json(decision, state, L).dump(2) + "\n";
      std::cout << text;
      writer.write("policy_at.json", text);
    } else if (command == "verify") {
      const auto report = run_verification(scenario.config);
      writer.write("verification_report.json", to_json(report) + "\n");
      std::cout << to_text(report);
      if (!report.all_passed()) exit_code = 1;
    } else if (command == "simulate") {
      const auto summary = summarize(simulate_paths(scenario.config, scenario.sim));
      writer.write("summary.csv", summary_csv(summary));
      std::cout << "paths=" << summary.valid_paths << " valid, " << summary.invalid_paths
                << " invalid\n";
    } else if (command == "sweep") {
      if (sweep_parameter.empty() || sweep_values.empty()) {
        throw std::invalid_argument("sweep requires --parameter and --values");
      }
      const auto points =
          sensitivity_sweep(scenario.config, scenario.sim, sweep_parameter, sweep_values);
      for (const auto& point : points) {
        std::ostringstream name;
        name << "sweep_" << sweep_parameter << '_' << format_g12(point.value) << ".csv";
        writer.write(name.str(), summary_csv(point.summary));
      }
    } else if (command == "figure-pack") {
      const auto& cfg = scenario.config;
      const auto& sim = scenario.sim;
      auto run = [&](const PlanConfig& c) { return summarize(simulate_paths(c, sim)); };

      const auto baseline = run(cfg);
      writer.write("fig_spread_parameters.csv", spread_csv(baseline));

      {
        std::ostringstream oss;
        oss << "kappa,t,mean_c,mean_b,mean_pi_over_A,mean_A\n";
        for (const double kappa : {0.01, 0.0, -0.005, -0.01}) {
          const auto summary = run(apply_sweep_parameter(cfg, "kappa", kappa));
          oss << trajectory_block(format_g12(kappa), summary);
        }
        writer.write("fig_kappa_sensitivity.csv", oss.str());
      }
      {
        std::ostringstream oss;
        oss << "T,t,mean_c,mean_b,mean_pi_over_A,mean_A\n";
        for (const double horizon : {10.0, 20.0, 30.0}) {
          const auto summary = run(apply_sweep_parameter(cfg, "T", horizon));
          oss << trajectory_block(format_g12(horizon), summary);
        }
        writer.write("fig_T_sensitivity.csv", oss.str());
      }
      {
        std::ostringstream oss;
        oss << "xr,omega,mean_c_t10,mean_b_t10,mean_pi_over_A_t10\n";
        for (const double xr : {60.0, 65.0, 70.0}) {
          for (const double omega : {4.0, 10.0, 20.0}) {
            PlanConfig c = apply_sweep_parameter(cfg, "x_r", xr);
            c = apply_sweep_parameter(c, "omega", omega);
            const auto summary = run(c);
            const auto i = index_at_time(summary, 10.0);
            oss << format_g12(xr) << ',' << format_g12(omega) << ','
                << format_g12(summary.contribution.mean[i]) << ','
                << format_g12(summary.benefit.mean[i]) << ','
                << format_g12(summary.invest_fraction.mean[i]) << '\n';
          }
        }
        writer.write("fig_xr_omega.csv", oss.str());
      }
      {
        std::ostringstream oss;
        oss << "xr,kappa,mean_c_t10,mean_b_t10,mean_pi_over_A_t10\n";
        for (const double xr : {60.0, 65.0, 70.0}) {
          for (const double kappa : {-0.01, 0.0, 0.01}) {
            PlanConfig c = apply_sweep_parameter(cfg, "x_r", xr);
            c = apply_sweep_parameter(c, "kappa", kappa);
            const auto summary = run(c);
            const auto i = index_at_time(summary, 10.0);
            oss << format_g12(xr) << ',' << format_g12(kappa) << ','
                << format_g12(summary.contribution.mean[i]) << ','
                << format_g12(summary.benefit.mean[i]) << ','
                << format_g12(summary.invest_fraction.mean[i]) << '\n';
          }
        }
        writer.write("fig_xr_kappa.csv", oss.str());
      }
      {
        std::ostringstream oss;
        oss << "gamma1,gamma2,mean_c_t10,mean_b_t10\n";
        for (const double g1 : {1.0, 2.0, 4.0}) {
          for (const double g2 : {1.0, 2.0, 4.0}) {
            PlanConfig c = apply_sweep_parameter(cfg, "gamma1", g1);
            c = apply_sweep_parameter(c, "gamma2", g2);
            const auto summary = run(c);
            const auto i = index_at_time(summary, 10.0);
            oss << format_g12(g1) << ',' << format_g12(g2) << ','
                << format_g12(summary.contribution.mean[i]) << ','
                << format_g12(summary.benefit.mean[i]) << '\n';
          }
        }
        writer.write("fig_gamma_weights.csv", oss.str());
      }
      {
        std::ostringstream oss;
        oss << "case,t,mean_c,mean_b,mean_pi_over_A,mean_A\n";
        oss << trajectory_block("baseline", baseline);
        oss << trajectory_block("no-ambiguity",
                                run(special_case(cfg, SpecialCase::NoAmbiguity)));
        oss << trajectory_block("no-longevity",
                                run(special_case(cfg, SpecialCase::NoLongevity)));
        oss << trajectory_block("neither", run(special_case(cfg, SpecialCase::Neither)));
        writer.write("fig_special_cases.csv", oss.str());
      }
    } else {
      throw std::invalid_argument("unknown command '" + command + "'");
    }
    writer.finalize();
  } catch (...) {
    writer.remove_partial_outputs();
    throw;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid pension plan policy engine and Monte Carlo runner"};
  app.set_version_flag("--version", kVersion);

  std::string scenario_path;
  std::string command;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  double policy_t = 0.0;
  double policy_a = 0.0;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  double age_step = 1.0;

  app.add_option("--scenario", scenario_path, "Scenario JSON file (defaults built in)");
  app.add_option("--command", command,
                 "One of: life-table, liability, policy-at, verify, simulate, sweep, figure-pack")
      ->required();
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--out", out_dir, "Override the scenario output directory");
  app.add_option("--threads", threads, "Override the scenario thread count");
  app.add_option("--t", policy_t, "Evaluation time for policy-at");
  app.add_option("--a", policy_a, "Fund level for policy-at");
  app.add_option("--parameter", sweep_parameter,
                 "Sweep parameter: kappa, T, x_r, omega, gamma1, gamma2, k, longevity-preset");
  app.add_option("--values", sweep_values, "Sweep values")->delimiter(',');
  app.add_option("--age-step", age_step, "Age step for the life-table dump");

  CLI11_PARSE(app, argc, argv);

  try {
    Scenario scenario;
    if (scenario_path.empty()) {
      scenario = default_scenario();
    } else {
      auto loaded = load_scenario_file(scenario_path);
      for (const auto& notice : loaded.notices) std::cerr << "notice: " << notice << '\n';
      scenario = loaded.scenario;
    }
    if (seed) scenario.sim.seed = *seed;
    if (out_dir) scenario.out_dir = *out_dir;
    if (threads) scenario.sim.threads = *threads;
    return run_command(command, scenario, policy_t, policy_a, sweep_parameter, sweep_values,
                       age_step);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
