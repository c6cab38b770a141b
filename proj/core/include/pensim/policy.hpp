#pragma once

#include "pensim/plan.hpp"

namespace pensim {

// Coefficient bundle entering the value function, with the cohort counts and
// discounting frozen at the evaluation time.
struct CostTerms {
  double quad_load;   // quadratic adjustment load from both cohort groups
  double net_flow;    // aggregate target contributions minus target benefits
  double rate_shift;  // squared Sharpe ratio over (2k - 1)
};

// Quadratic value-function shape V(t,a) = w3 * e^(-rt) * curvature * (a + offset)^2.
struct ValueShape {
  double curvature;  // P
  double offset;     // Q
};

struct Adjustments {
  double contribution;  // subtracted from the target contribution
  double benefit;       // added to the target benefit
};

struct SpreadParams {
  bool defined = false;  // false when the surplus is numerically zero
  double contribution = 0.0;
  double benefit = 0.0;
};

struct ControlDecision {
  double drift_distortion;
  double risky_investment;
  double contribution_adjustment;
  double benefit_adjustment;
  double contribution;
  double benefit;
  SpreadParams spread;
};

CostTerms cost_terms(const PlanConfig& config, double time);
CostTerms cost_terms(const PlanConfig& config, double time, double active, double retired);

// Reciprocal of the value curvature; equals 1 exactly at the horizon.
double inverse_curvature(const PlanConfig& config, double time);
double inverse_curvature(const PlanConfig& config, double time, const CostTerms& terms);

ValueShape value_shape(const PlanConfig& config, double time);
ValueShape value_shape(const PlanConfig& config, double time, const CostTerms& terms);

// Worst-case drift distortion. State-independent under both forms.
double worst_case_drift(const PlanConfig& config);

// Amount in the risky asset: proportional to assets plus the value offset.
double optimal_investment(const PlanConfig& config, const FundState& state);
double optimal_investment(const PlanConfig& config, const FundState& state, const ValueShape& shape);

Adjustments optimal_adjustments(const PlanConfig& config, const FundState& state);
Adjustments optimal_adjustments(const PlanConfig& config, const FundState& state,
                                const ValueShape& shape, double active, double retired);

// Spread parameters implied by the feedback adjustments and the surplus.
SpreadParams implied_spread(const PlanConfig& config, const FundState& state, double liability);
SpreadParams implied_spread(const PlanConfig& config, const FundState& state, double liability,
                            const ValueShape& shape, double active, double retired);

double value_function(const PlanConfig& config, const FundState& state);

// Full decision record at (t, a). The controls are closed-form feedback in the
// assets, square-integrable by construction.
ControlDecision realized_policy(const PlanConfig& config, const FundState& state, double liability);
ControlDecision realized_policy(const PlanConfig& config, const FundState& state, double liability,
                                const ValueShape& shape, double active, double retired);

enum class SpecialCase { NoAmbiguity, NoLongevity, Neither };

// Parameter substitution only; the evaluation path is unchanged.
PlanConfig special_case(PlanConfig base, SpecialCase which);

}  // namespace pensim
