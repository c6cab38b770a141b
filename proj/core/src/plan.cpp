#include "pensim/plan.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pensim {

namespace {
constexpr double kSingularTolerance = 1e-12;
}

void MarketParams::validate() const {
  if (!(risky_volatility > 0.0)) throw std::invalid_argument("market: volatility must be > 0");
  if (!(risky_drift > risk_free_rate)) {
    throw std::invalid_argument("market: no-arbitrage requires risky drift > risk-free rate");
  }
}

void PensionRules::validate() const {
  if (!(contribution_target > 0.0)) throw std::invalid_argument("rules: contribution target must be > 0");
  if (!(benefit_target > 0.0)) throw std::invalid_argument("rules: benefit target must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("rules: horizon must be > 0");
  if (!(initial_fund >= 0.0)) throw std::invalid_argument("rules: initial fund must be >= 0");
}

void ObjectiveWeights::validate() const {
  if (!(contribution_weight > 0.0 && benefit_weight > 0.0 && discontinuity_weight > 0.0)) {
    throw std::invalid_argument("weights: all three cost weights must be > 0");
  }
  if (!(ambiguity_aversion >= 0.0)) {
    throw std::invalid_argument("weights: ambiguity aversion must be >= 0");
  }
  if (std::abs(2.0 * ambiguity_aversion - 1.0) < kSingularTolerance) {
    throw std::invalid_argument("weights: ambiguity aversion 0.5 is singular (2k - 1 vanishes)");
  }
}

std::vector<std::string> PlanConfig::violations() const {
  std::vector<std::string> out;
  auto collect = [&out](auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      out.emplace_back(e.what());
    }
  };
  collect([&] { population.validate(); });
  collect([&] { market.validate(); });
  collect([&] { rules.validate(); });
  collect([&] { weights.validate(); });

  const double r = market.risk_free_rate;
  if (std::abs(r) < kSingularTolerance) {
    out.emplace_back("market: risk-free rate of zero is rejected (annuity limit not implemented)");
  }
  // 2r + g3 divides the curvature closed form.
  const double two_k_minus_1 = 2.0 * weights.ambiguity_aversion - 1.0;
  if (std::abs(two_k_minus_1) >= kSingularTolerance && market.risky_volatility > 0.0) {
    const double phi = market.sharpe_ratio();
    const double rate_shift = phi * phi / two_k_minus_1;
    if (std::abs(2.0 * r + rate_shift) < kSingularTolerance) {
      out.emplace_back("config: 2r plus the robust rate shift vanishes; curvature closed form singular");
    }
  }
  return out;
}

void PlanConfig::validate() const {
  const auto reasons = violations();
  if (reasons.empty()) return;
  std::ostringstream oss;
  oss << "invalid configuration (" << reasons.size() << " violation(s)):";
  for (const auto& reason : reasons) oss << "\n  - " << reason;
  throw std::invalid_argument(oss.str());
}

double target_contribution(const PensionRules& rules, double time) {
  return rules.contribution_target * std::exp(rules.target_growth_rate * time);
}

double target_benefit(const PensionRules& rules, double time) {
  return rules.benefit_target * std::exp(rules.target_growth_rate * time);
}

double target_liability(const PlanConfig& config, const LiabilitySteps& steps) {
  const auto& pop = config.population;
  const auto& rules = config.rules;
  const double r = config.market.risk_free_rate;
  const double T = rules.horizon;
  const std::size_t nt = steps.inner_time_subintervals + (steps.inner_time_subintervals % 2);
  const double dt = T / static_cast<double>(nt);

  // Cohort counts are age-independent, so cache them on the inner grid.
  std::vector<double> flow_net(nt + 1), flow_benefit(nt + 1), disc(nt + 1);
  for (std::size_t i = 0; i <= nt; ++i) {
    const double t = dt * static_cast<double>(i);
    const double active = active_count(pop, t, steps.outer_age_step);
    const double retired = retired_count(pop, t, steps.outer_age_step);
    const double cb = retired * target_benefit(rules, t);
    const double cc = active * target_contribution(rules, t);
    flow_net[i] = cb - cc;
    flow_benefit[i] = cb;
    disc[i] = std::exp(-r * t);
  }

  auto inner = [&](const std::vector<double>& flow, double cohort_seniority) {
    // Discount exponent -r*(t - (x - x0)), or -r*t under the to-time-zero switch.
    const double scale = config.liability_discount == LiabilityDiscount::AsPrinted
                             ? std::exp(r * cohort_seniority)
                             : 1.0;
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < nt; i += 2) odd += flow[i] * disc[i];
    for (std::size_t i = 2; i < nt; i += 2) even += flow[i] * disc[i];
    return scale * dt / 3.0 *
           (flow[0] * disc[0] + flow[nt] * disc[nt] + 4.0 * odd + 2.0 * even);
  };

  const double x0 = pop.entry_age;
  const auto n_active = subintervals_for_step(x0, pop.retirement_age, steps.outer_age_step);
  const double active_branch =
      simpson([&](double x) { return inner(flow_net, x - x0); }, x0, pop.retirement_age, n_active);

  // Retired branch runs to the initial maximum age: the cohorts present at the
  // valuation date.
  const double m0 = pop.frontier.initial_max_age;
  double retired_branch = 0.0;
  if (m0 > pop.retirement_age) {
    const auto n_ret = subintervals_for_step(pop.retirement_age, m0, steps.outer_age_step);
    retired_branch = simpson([&](double x) { return inner(flow_benefit, x - x0); },
                             pop.retirement_age, m0, n_ret);
  }
  const double value = active_branch + retired_branch;
  if (!std::isfinite(value)) throw std::runtime_error("target liability: quadrature failure");
  return value;
}

double surplus(const FundState& state, double liability) { return state.assets - liability; }

double contribution_rule(const PensionRules& rules, double time, double adjustment) {
  return target_contribution(rules, time) - adjustment;
}

double benefit_rule(const PensionRules& rules, double time, double adjustment) {
  return target_benefit(rules, time) + adjustment;
}

AssetDynamics asset_dynamics(const PlanConfig& config, const FundState& state, double invest,
                             double contribution_now, double benefit_now, double distortion,
                             double active, double retired) {
  const double excess = config.market.risky_drift - config.market.risk_free_rate;
  const double sigma = config.market.risky_volatility;
  const double drift = invest * excess + state.assets * config.market.risk_free_rate +
                       active * contribution_now - retired * benefit_now +
                       sigma * invest * distortion;
  return {drift, sigma * invest};
}

AssetDynamics asset_dynamics(const PlanConfig& config, const FundState& state, double invest,
                             double contribution_now, double benefit_now, double distortion) {
  return asset_dynamics(config, state, invest, contribution_now, benefit_now, distortion,
                        active_count(config.population, state.time),
                        retired_count(config.population, state.time));
}

}  // namespace pensim
