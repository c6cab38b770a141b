#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pensim/policy.hpp"

namespace pensim {

enum class Measure { Reference, WorstCase };

struct SimulationSpec {
  std::size_t steps = 1000;
  std::size_t paths = 1000;
  std::uint64_t seed = 42;
  Measure measure = Measure::Reference;
  unsigned threads = 1;
  double overflow_guard = 1e12;  // a path exceeding this in magnitude is invalid

  void validate() const;
};

// Everything the closed-loop policy needs, tabulated on the step grid once
// per scenario. Values are produced by the same functions the policy module
// exposes, so table evaluation and direct evaluation agree bitwise.
struct CoefficientTable {
  std::vector<double> time;
  std::vector<double> active;
  std::vector<double> retired;
  std::vector<double> curvature;  // P
  std::vector<double> offset;     // Q
  std::vector<double> target_contribution;
  std::vector<double> target_benefit;
  double liability = 0.0;
  double drift_distortion = 0.0;
  double dt = 0.0;
};

CoefficientTable build_coefficient_table(const PlanConfig& config, std::size_t steps);

// Struct-of-arrays path storage, row-major per path.
struct PathGrid {
  std::size_t paths = 0;
  std::size_t points = 0;  // steps + 1
  std::vector<double> assets;
  std::vector<double> invest;
  std::vector<double> contribution;
  std::vector<double> benefit;
  std::vector<double> adj_contribution;
  std::vector<double> adj_benefit;
  std::vector<double> shocks;  // driving normal increments, steps per path
  std::vector<std::uint8_t> valid;

  double at(const std::vector<double>& field, std::size_t path, std::size_t point) const {
    return field[path * points + point];
  }
};

// Optional override of the Brownian increments (path, step) -> dB. Used by the
// discretization-refinement tests to supply bridge-consistent draws.
using IncrementFn = std::function<double(std::size_t, std::size_t)>;

struct SimulationResult {
  CoefficientTable table;
  PathGrid grid;
  SimulationSpec spec;
};

// Euler scheme on the fund, policy refreshed at the left endpoint of every
// subinterval. Deterministic given (config, spec): the increments are
// counter-based, so thread count cannot change the output.
SimulationResult simulate_paths(const PlanConfig& config, const SimulationSpec& spec,
                                const IncrementFn& increments = {});

struct SummaryStat {
  std::vector<double> mean;
  std::vector<double> q05, q25, q50, q75, q95;
};

struct SimulationSummary {
  std::vector<double> time;
  SummaryStat contribution;
  SummaryStat benefit;
  SummaryStat invest_fraction;  // risky amount over fund value
  SummaryStat assets;
  std::vector<double> mean_spread_contribution;  // implied alpha
  std::vector<double> mean_spread_benefit;       // implied beta
  std::size_t valid_paths = 0;
  std::size_t invalid_paths = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

SimulationSummary summarize(const SimulationResult& result);

// CSV with one row per grid time: t, means, then quantile blocks.
std::string summary_csv(const SimulationSummary& summary);

struct SweepPoint {
  double value;
  SimulationSummary summary;
};

// One summary per parameter value, common random numbers across values.
// Parameter names: kappa, T, x_r, omega, gamma1, gamma2, k, longevity-preset.
std::vector<SweepPoint> sensitivity_sweep(const PlanConfig& config, const SimulationSpec& spec,
                                          const std::string& parameter,
                                          std::span<const double> values);

PlanConfig apply_sweep_parameter(PlanConfig config, const std::string& parameter, double value);

// Canonical flat serialization of a configuration, hashed into summaries.
std::uint64_t config_hash(const PlanConfig& config);

}  // namespace pensim
