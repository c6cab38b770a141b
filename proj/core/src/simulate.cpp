#include "pensim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pensim/io.hpp"
#include "pensim/rng.hpp"

namespace pensim {

void SimulationSpec::validate() const {
  if (steps < 1) throw std::invalid_argument("simulation: steps must be >= 1");
  if (paths < 1) throw std::invalid_argument("simulation: paths must be >= 1");
  if (threads < 1) throw std::invalid_argument("simulation: threads must be >= 1");
  if (!(overflow_guard > 0.0)) throw std::invalid_argument("simulation: overflow guard must be > 0");
}

CoefficientTable build_coefficient_table(const PlanConfig& config, std::size_t steps) {
  config.validate();
  CoefficientTable table;
  const double T = config.rules.horizon;
  table.dt = T / static_cast<double>(steps);
  const std::size_t points = steps + 1;
  table.time.resize(points);
  table.active.resize(points);
  table.retired.resize(points);
  table.curvature.resize(points);
  table.offset.resize(points);
  table.target_contribution.resize(points);
  table.target_benefit.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = i + 1 == points ? T : table.dt * static_cast<double>(i);
    table.time[i] = t;
    table.active[i] = active_count(config.population, t);
    table.retired[i] = retired_count(config.population, t);
    const auto shape = value_shape(config, t, cost_terms(config, t, table.active[i], table.retired[i]));
    table.curvature[i] = shape.curvature;
    table.offset[i] = shape.offset;
    table.target_contribution[i] = target_contribution(config.rules, t);
    table.target_benefit[i] = target_benefit(config.rules, t);
  }
  table.liability = target_liability(config);
  table.drift_distortion = worst_case_drift(config);
  return table;
}

SimulationResult simulate_paths(const PlanConfig& config, const SimulationSpec& spec,
                                const IncrementFn& increments) {
  spec.validate();
  SimulationResult result;
  result.spec = spec;
  result.table = build_coefficient_table(config, spec.steps);
  const CoefficientTable& table = result.table;

  PathGrid& grid = result.grid;
  grid.paths = spec.paths;
  grid.points = spec.steps + 1;
  const std::size_t cells = grid.paths * grid.points;
  grid.assets.resize(cells);
  grid.invest.resize(cells);
  grid.contribution.resize(cells);
  grid.benefit.resize(cells);
  grid.adj_contribution.resize(cells);
  grid.adj_benefit.resize(cells);
  grid.shocks.resize(grid.paths * spec.steps);
  grid.valid.assign(grid.paths, 1);

  const auto& mkt = config.market;
  const auto& w = config.weights;
  const double invest_coef =
      mkt.sharpe_ratio() / ((2.0 * w.ambiguity_aversion - 1.0) * mkt.risky_volatility);
  const double excess = mkt.risky_drift - mkt.risk_free_rate;
  const double dt = table.dt;
  const double sqrt_dt = std::sqrt(dt);
  const bool worst_case = spec.measure == Measure::WorstCase;
  const double distortion = table.drift_distortion;

  std::vector<double> adj_c_coef(grid.points), adj_b_coef(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    adj_c_coef[i] = w.discontinuity_weight / w.contribution_weight * table.active[i] *
                    table.curvature[i];
    adj_b_coef[i] = w.discontinuity_weight / w.benefit_weight * table.retired[i] *
                    table.curvature[i];
  }

  auto run_path = [&](std::size_t p) {
    const std::size_t base = p * grid.points;
    double assets = config.rules.initial_fund;
    for (std::size_t i = 0; i < grid.points; ++i) {
      const double gap = assets + table.offset[i];
      const double invest = invest_coef * gap;
      const double adj_c = adj_c_coef[i] * gap;
      const double adj_b = adj_b_coef[i] * gap;
      const double contribution = table.target_contribution[i] - adj_c;
      const double benefit = table.target_benefit[i] + adj_b;
      grid.assets[base + i] = assets;
      grid.invest[base + i] = invest;
      grid.contribution[base + i] = contribution;
      grid.benefit[base + i] = benefit;
      grid.adj_contribution[base + i] = adj_c;
      grid.adj_benefit[base + i] = adj_b;
      if (i == spec.steps) break;
      const double shock = increments ? increments(p, i)
                                      : standard_normal(spec.seed, p, i) * sqrt_dt;
      grid.shocks[p * spec.steps + i] = shock;
      double drift = invest * excess + assets * mkt.risk_free_rate +
                     table.active[i] * contribution - table.retired[i] * benefit;
      if (worst_case) drift += mkt.risky_volatility * invest * distortion;
      assets += drift * dt + mkt.risky_volatility * invest * shock;
      if (!std::isfinite(assets) || std::abs(assets) > spec.overflow_guard) {
        grid.valid[p] = 0;
        return;
      }
    }
  };

  const unsigned threads = std::min<unsigned>(spec.threads, static_cast<unsigned>(spec.paths));
  if (threads <= 1) {
    for (std::size_t p = 0; p < spec.paths; ++p) run_path(p);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (spec.paths + threads - 1) / threads;
    for (unsigned ti = 0; ti < threads; ++ti) {
      const std::size_t lo = ti * chunk;
      const std::size_t hi = std::min(spec.paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t p = lo; p < hi; ++p) run_path(p);
      });
    }
    for (auto& th : pool) th.join();
  }
  return result;
}

namespace {

// Order-insensitive mean: pairwise reduction over a fixed index range.
double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void summarize_quantity(const std::vector<double>& field, const PathGrid& grid,
                        const std::vector<std::size_t>& valid_paths, SummaryStat& out,
                        bool divide_by_assets) {
  const std::size_t points = grid.points;
  out.mean.resize(points);
  out.q05.resize(points);
  out.q25.resize(points);
  out.q50.resize(points);
  out.q75.resize(points);
  out.q95.resize(points);
  std::vector<double> values(valid_paths.size());
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t vi = 0; vi < valid_paths.size(); ++vi) {
      const std::size_t idx = valid_paths[vi] * points + i;
      values[vi] = divide_by_assets ? field[idx] / grid.assets[idx] : field[idx];
    }
    out.mean[i] = pairwise_sum(values.data(), values.size()) / static_cast<double>(values.size());
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    out.q05[i] = quantile_sorted(sorted, 0.05);
    out.q25[i] = quantile_sorted(sorted, 0.25);
    out.q50[i] = quantile_sorted(sorted, 0.50);
    out.q75[i] = quantile_sorted(sorted, 0.75);
    out.q95[i] = quantile_sorted(sorted, 0.95);
  }
}

}  // namespace

SimulationSummary summarize(const SimulationResult& result) {
  const PathGrid& grid = result.grid;
  std::vector<std::size_t> valid_paths;
  valid_paths.reserve(grid.paths);
  for (std::size_t p = 0; p < grid.paths; ++p) {
    if (grid.valid[p]) valid_paths.push_back(p);
  }
  if (valid_paths.empty()) throw std::runtime_error("summarize: every path was invalid");

  SimulationSummary summary;
  summary.time = result.table.time;
  summary.valid_paths = valid_paths.size();
  summary.invalid_paths = grid.paths - valid_paths.size();
  summary.seed = result.spec.seed;

  summarize_quantity(grid.contribution, grid, valid_paths, summary.contribution, false);
  summarize_quantity(grid.benefit, grid, valid_paths, summary.benefit, false);
  summarize_quantity(grid.invest, grid, valid_paths, summary.invest_fraction, true);
  summarize_quantity(grid.assets, grid, valid_paths, summary.assets, false);

  // Implied spread parameters, averaged over paths with a non-degenerate surplus.
  const double liability = result.table.liability;
  summary.mean_spread_contribution.resize(grid.points);
  summary.mean_spread_benefit.resize(grid.points);
  std::vector<double> alpha(valid_paths.size()), beta(valid_paths.size());
  for (std::size_t i = 0; i < grid.points; ++i) {
    std::size_t n = 0;
    for (std::size_t vi = 0; vi < valid_paths.size(); ++vi) {
      const std::size_t idx = valid_paths[vi] * grid.points + i;
      const double sp = grid.assets[idx] - liability;
      if (std::abs(sp) < 1e-9 * std::max(1.0, std::abs(liability))) continue;
      alpha[n] = grid.adj_contribution[idx] * result.table.active[i] / sp;
      beta[n] = grid.adj_benefit[idx] * result.table.retired[i] / sp;
      ++n;
    }
    summary.mean_spread_contribution[i] =
        n > 0 ? pairwise_sum(alpha.data(), n) / static_cast<double>(n) : 0.0;
    summary.mean_spread_benefit[i] =
        n > 0 ? pairwise_sum(beta.data(), n) / static_cast<double>(n) : 0.0;
  }
  return summary;
}

std::string summary_csv(const SimulationSummary& summary) {
  std::ostringstream oss;
  oss << "t,mean_c,mean_b,mean_pi_over_A,mean_A";
  const char* names[] = {"c", "b", "pi_over_A", "A"};
  const char* qs[] = {"q05", "q25", "q50", "q75", "q95"};
  for (const char* name : names) {
    for (const char* q : qs) oss << ',' << q << '_' << name;
  }
  oss << '\n';
  const SummaryStat* stats[] = {&summary.contribution, &summary.benefit,
                                &summary.invest_fraction, &summary.assets};
  for (std::size_t i = 0; i < summary.time.size(); ++i) {
    oss << format_g12(summary.time[i]) << ',' << format_g12(summary.contribution.mean[i]) << ','
        << format_g12(summary.benefit.mean[i]) << ',' << format_g12(summary.invest_fraction.mean[i])
        << ',' << format_g12(summary.assets.mean[i]);
    for (const SummaryStat* stat : stats) {
      oss << ',' << format_g12(stat->q05[i]) << ',' << format_g12(stat->q25[i]) << ','
          << format_g12(stat->q50[i]) << ',' << format_g12(stat->q75[i]) << ','
          << format_g12(stat->q95[i]);
    }
    oss << '\n';
  }
  return oss.str();
}

PlanConfig apply_sweep_parameter(PlanConfig config, const std::string& parameter, double value) {
  if (parameter == "kappa") {
    config.population.entry.growth_rate = value;
  } else if (parameter == "T") {
    config.rules.horizon = value;
  } else if (parameter == "x_r") {
    config.population.retirement_age = value;
  } else if (parameter == "omega") {
    config.population.mortality.longevity_period = value;
    config.population.mortality.longevity_trend = true;
  } else if (parameter == "gamma1") {
    config.weights.contribution_weight = value;
  } else if (parameter == "gamma2") {
    config.weights.benefit_weight = value;
  } else if (parameter == "k") {
    config.weights.ambiguity_aversion = value;
  } else if (parameter == "longevity-preset") {
    // Nonzero selects the no-longevity variant.
    if (value != 0.0) config = special_case(std::move(config), SpecialCase::NoLongevity);
  } else {
    throw std::invalid_argument("sensitivity sweep: unknown parameter '" + parameter + "'");
  }
  return config;
}

std::vector<SweepPoint> sensitivity_sweep(const PlanConfig& config, const SimulationSpec& spec,
                                          const std::string& parameter,
                                          std::span<const double> values) {
  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (const double value : values) {
    const PlanConfig varied = apply_sweep_parameter(config, parameter, value);
    auto summary = summarize(simulate_paths(varied, spec));
    summary.config_hash = config_hash(varied);
    out.push_back({value, std::move(summary)});
  }
  return out;
}

std::uint64_t config_hash(const PlanConfig& config) {
  std::ostringstream oss;
  oss.precision(17);
  const auto& p = config.population;
  oss << p.mortality.base_hazard << '|' << p.mortality.makeham_scale << '|'
      << p.mortality.makeham_base << '|' << p.mortality.longevity_period << '|'
      << p.mortality.longevity_trend << '|' << p.frontier.initial_max_age << '|'
      << p.frontier.expansion_rate << '|' << p.entry.initial_density << '|'
      << p.entry.growth_rate << '|' << p.entry_age << '|' << p.retirement_age << '|'
      << config.market.risk_free_rate << '|' << config.market.risky_drift << '|'
      << config.market.risky_volatility << '|' << config.rules.contribution_target << '|'
      << config.rules.benefit_target << '|' << config.rules.target_growth_rate << '|'
      << config.rules.initial_fund << '|' << config.rules.horizon << '|'
      << config.weights.contribution_weight << '|' << config.weights.benefit_weight << '|'
      << config.weights.discontinuity_weight << '|' << config.weights.ambiguity_aversion << '|'
      << static_cast<int>(config.distortion_form) << '|'
      << static_cast<int>(config.liability_discount);
  return fnv1a64(oss.str());
}

}  // namespace pensim
