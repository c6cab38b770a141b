#include "pensim/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace pensim {

namespace {

constexpr double kSingularTolerance = 1e-12;

double two_k_minus_one(const PlanConfig& config) {
  const double v = 2.0 * config.weights.ambiguity_aversion - 1.0;
  if (std::abs(v) < kSingularTolerance) {
    throw std::domain_error("policy: ambiguity aversion 0.5 is singular");
  }
  return v;
}

// Surplus below this scale makes the implied spreads undefined.
double surplus_tolerance(const FundState& state, double liability) {
  return 1e-9 * std::max({1.0, std::abs(state.assets), std::abs(liability)});
}

}  // namespace

CostTerms cost_terms(const PlanConfig& config, double time, double active, double retired) {
  const double denom = two_k_minus_one(config);
  const double phi = config.market.sharpe_ratio();
  const double discount = std::exp(-config.market.risk_free_rate * time);
  const double growth = std::exp(config.rules.target_growth_rate * time);
  return {
      active * active / (4.0 * config.weights.contribution_weight * discount) +
          retired * retired / (4.0 * config.weights.benefit_weight * discount),
      active * config.rules.contribution_target * growth -
          retired * config.rules.benefit_target * growth,
      phi * phi / denom,
  };
}

CostTerms cost_terms(const PlanConfig& config, double time) {
  return cost_terms(config, time, active_count(config.population, time),
                    retired_count(config.population, time));
}

double inverse_curvature(const PlanConfig& config, double time, const CostTerms& terms) {
  const double r = config.market.risk_free_rate;
  const double T = config.rules.horizon;
  const double rate = 2.0 * r + terms.rate_shift;
  if (std::abs(rate) < kSingularTolerance) {
    throw std::domain_error("policy: 2r plus the rate shift vanishes");
  }
  // -expm1 keeps the horizon value exactly 1.
  return std::exp(-(r + terms.rate_shift) * (T - time)) +
         4.0 * terms.quad_load * config.weights.discontinuity_weight / rate * std::exp(-r * time) *
             (-std::expm1(-rate * (T - time)));
}

double inverse_curvature(const PlanConfig& config, double time) {
  return inverse_curvature(config, time, cost_terms(config, time));
}

ValueShape value_shape(const PlanConfig& config, double time, const CostTerms& terms) {
  const double r = config.market.risk_free_rate;
  if (std::abs(r) < kSingularTolerance) {
    throw std::domain_error("policy: zero risk-free rate is rejected");
  }
  const double T = config.rules.horizon;
  const double curvature = 1.0 / inverse_curvature(config, time, terms);
  const double offset = terms.net_flow / r * (-std::expm1(-r * (T - time))) -
                        config.rules.initial_fund * std::exp(r * time);
  return {curvature, offset};
}

ValueShape value_shape(const PlanConfig& config, double time) {
  return value_shape(config, time, cost_terms(config, time));
}

double worst_case_drift(const PlanConfig& config) {
  const double denom = two_k_minus_one(config);
  const double k = config.weights.ambiguity_aversion;
  const double phi = config.market.sharpe_ratio();
  switch (config.distortion_form) {
    case DriftDistortionForm::AsPrinted:
      return -k * phi / (2.0 * denom);
    case DriftDistortionForm::FocDerived:
      // Stationary point of the penalized objective in the distortion.
      return -2.0 * k * phi / denom;
  }
  throw std::logic_error("unreachable");
}

double optimal_investment(const PlanConfig& config, const FundState& state,
                          const ValueShape& shape) {
  const double denom = two_k_minus_one(config);
  return config.market.sharpe_ratio() / (denom * config.market.risky_volatility) *
         (state.assets + shape.offset);
}

double optimal_investment(const PlanConfig& config, const FundState& state) {
  return optimal_investment(config, state, value_shape(config, state.time));
}

Adjustments optimal_adjustments(const PlanConfig& config, const FundState& state,
                                const ValueShape& shape, double active, double retired) {
  const double w3 = config.weights.discontinuity_weight;
  const double gap = state.assets + shape.offset;
  return {
      w3 / config.weights.contribution_weight * active * shape.curvature * gap,
      w3 / config.weights.benefit_weight * retired * shape.curvature * gap,
  };
}

Adjustments optimal_adjustments(const PlanConfig& config, const FundState& state) {
  const double active = active_count(config.population, state.time);
  const double retired = retired_count(config.population, state.time);
  return optimal_adjustments(config, state, value_shape(config, state.time), active, retired);
}

SpreadParams implied_spread(const PlanConfig& config, const FundState& state, double liability,
                            const ValueShape& shape, double active, double retired) {
  const double sp = surplus(state, liability);
  if (std::abs(sp) < surplus_tolerance(state, liability)) return {};
  const auto adj = optimal_adjustments(config, state, shape, active, retired);
  return {true, adj.contribution * active / sp, adj.benefit * retired / sp};
}

SpreadParams implied_spread(const PlanConfig& config, const FundState& state, double liability) {
  const double active = active_count(config.population, state.time);
  const double retired = retired_count(config.population, state.time);
  return implied_spread(config, state, liability, value_shape(config, state.time), active,
                        retired);
}

double value_function(const PlanConfig& config, const FundState& state) {
  const auto shape = value_shape(config, state.time);
  const double gap = state.assets + shape.offset;
  return config.weights.discontinuity_weight *
         std::exp(-config.market.risk_free_rate * state.time) * shape.curvature * gap * gap;
}

ControlDecision realized_policy(const PlanConfig& config, const FundState& state, double liability,
                                const ValueShape& shape, double active, double retired) {
  const auto adj = optimal_adjustments(config, state, shape, active, retired);
  ControlDecision decision{};
  decision.drift_distortion = worst_case_drift(config);
  decision.risky_investment = optimal_investment(config, state, shape);
  decision.contribution_adjustment = adj.contribution;
  decision.benefit_adjustment = adj.benefit;
  decision.contribution = contribution_rule(config.rules, state.time, adj.contribution);
  decision.benefit = benefit_rule(config.rules, state.time, adj.benefit);
  decision.spread = implied_spread(config, state, liability, shape, active, retired);
  return decision;
}

ControlDecision realized_policy(const PlanConfig& config, const FundState& state,
                                double liability) {
  const double active = active_count(config.population, state.time);
  const double retired = retired_count(config.population, state.time);
  return realized_policy(config, state, liability, value_shape(config, state.time), active,
                         retired);
}

PlanConfig special_case(PlanConfig base, SpecialCase which) {
  if (which == SpecialCase::NoAmbiguity || which == SpecialCase::Neither) {
    base.weights.ambiguity_aversion = 0.0;
  }
  if (which == SpecialCase::NoLongevity || which == SpecialCase::Neither) {
    base.population.mortality.longevity_trend = false;
    base.population.frontier.expansion_rate = 0.0;
  }
  return base;
}

}  // namespace pensim
