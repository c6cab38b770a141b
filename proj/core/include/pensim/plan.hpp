#pragma once

#include <cstddef>
#include <vector>

#include "pensim/demography.hpp"

namespace pensim {

struct MarketParams {
  double risk_free_rate = 0.01;   // per year
  double risky_drift = 0.05;      // per year
  double risky_volatility = 0.15; // per sqrt-year

  double sharpe_ratio() const { return (risky_drift - risk_free_rate) / risky_volatility; }
  void validate() const;
};

struct PensionRules {
  double contribution_target = 0.1;  // per cohort per year at t = 0
  double benefit_target = 0.7;       // per cohort per year at t = 0
  double target_growth_rate = 0.02;  // per year
  double initial_fund = 3000.0;
  double horizon = 20.0;             // years

  void validate() const;
};

struct ObjectiveWeights {
  double contribution_weight = 2.0;  // penalty on contribution instability
  double benefit_weight = 2.0;       // penalty on benefit instability
  double discontinuity_weight = 2.0; // penalty on terminal fund drift
  double ambiguity_aversion = 2.0;   // >= 0; 0.5 is a structural singularity

  void validate() const;
};

// Which closed form the worst-case drift distortion uses. The first-order
// condition and the printed constant disagree by a factor of four; both are
// available and the verification oracle reports which one is stationary.
enum class DriftDistortionForm { AsPrinted, FocDerived };

// Discounting convention inside the target-liability integral. AsPrinted
// discounts each cohort to its own entry date, ToTimeZero to the valuation date.
enum class LiabilityDiscount { AsPrinted, ToTimeZero };

struct PlanConfig {
  PopulationStructure population;
  MarketParams market;
  PensionRules rules;
  ObjectiveWeights weights;
  DriftDistortionForm distortion_form = DriftDistortionForm::AsPrinted;
  LiabilityDiscount liability_discount = LiabilityDiscount::AsPrinted;

  // Collects every violated constraint; empty means valid.
  std::vector<std::string> violations() const;
  // Throws std::invalid_argument listing all violations.
  void validate() const;
};

struct FundState {
  double time = 0.0;
  double assets = 0.0;
};

// Target paths c*e^(tau t) and b*e^(tau t).
double target_contribution(const PensionRules& rules, double time);
double target_benefit(const PensionRules& rules, double time);

struct LiabilitySteps {
  std::size_t inner_time_subintervals = 1000;  // matches the simulation grid
  double outer_age_step = kAgeStep;
};

// Time-invariant target liability: nested quadrature, outer over age (active
// branch on [entry_age, retirement_age], retired branch up to the initial
// maximum age), inner over time in [0, horizon] of the discounted target flows.
double target_liability(const PlanConfig& config, const LiabilitySteps& steps = {});

// Fund surplus over the target liability.
double surplus(const FundState& state, double liability);

// Realized contribution/benefit given the adjustment spreads. Deliberately
// unclamped: negative contributions are rebates and do occur.
double contribution_rule(const PensionRules& rules, double time, double adjustment);
double benefit_rule(const PensionRules& rules, double time, double adjustment);

struct AssetDynamics {
  double drift;      // per year
  double diffusion;  // per sqrt-year
};

// Instantaneous drift/diffusion of the fund under investment `invest`,
// realized flows, and drift distortion `distortion` (0 = reference measure).
AssetDynamics asset_dynamics(const PlanConfig& config, const FundState& state, double invest,
                             double contribution_now, double benefit_now, double distortion);
AssetDynamics asset_dynamics(const PlanConfig& config, const FundState& state, double invest,
                             double contribution_now, double benefit_now, double distortion,
                             double active, double retired);

}  // namespace pensim
