#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pensim/policy.hpp"

namespace pensim {

enum class CoefficientMode { FrozenAtEval, TimeVarying };

// Backward integration of the value-shape system from the horizon down to
// t_eval. The curvature equation is integrated in its reciprocal (linear)
// variable: the raw quadratic form has a terminal boundary layer several
// orders of magnitude faster than any fixed step. The offset is integrated
// both in reduced form and from the unreduced equation.
struct OdeSolution {
  std::vector<double> grid;         // ascending, t_eval .. horizon
  std::vector<double> curvature;    // P on the grid
  std::vector<double> offset;       // Q, reduced equation
  std::vector<double> offset_full;  // Q, unreduced equation
  double step = 0.0;
  int method_order = 4;
  double curvature_at_eval = 0.0;
  double offset_at_eval = 0.0;
  double curvature_halved_step = 0.0;  // convergence certificate companion
  double max_offset_form_gap = 0.0;    // |reduced - unreduced| over the grid
};

OdeSolution solve_value_ode(const PlanConfig& config, double t_eval, CoefficientMode mode,
                            std::size_t steps = 4000);

// Pointwise residual of the optimized dynamic-programming equation evaluated
// with the closed-form value function and frozen coefficients. The
// `shape_perturbation` knob rescales the rate-shift coefficient inside the
// value shape only, leaving the equation itself untouched; nonzero values are
// the negative control.
struct ResidualReport {
  std::vector<double> times;
  std::vector<double> assets;
  std::vector<double> relative;  // row-major times x assets; NaN where skipped
  double max_abs = 0.0;
  double max_rel = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // degenerate points with vanishing value function
  DriftDistortionForm form = DriftDistortionForm::AsPrinted;
};

// The FocDerived form evaluates the reduced equation with the distortion
// eliminated through its stationarity condition; AsPrinted evaluates the full
// bracket at the printed distortion constant (a diagnostic that is not
// expected to vanish).
ResidualReport hjb_residual(const PlanConfig& config, std::span<const double> times,
                            std::span<const double> assets,
                            DriftDistortionForm form = DriftDistortionForm::FocDerived,
                            double shape_perturbation = 0.0);

// Default 21x21 residual grid: t in [0, 0.95*horizon], assets within 50% of
// the initial fund, degenerate points excluded.
ResidualReport hjb_residual_default_grid(const PlanConfig& config,
                                         DriftDistortionForm form = DriftDistortionForm::FocDerived,
                                         double shape_perturbation = 0.0);

// Central-difference stationarity of the optimized objective at the
// closed-form controls. Gradients are scaled by the control magnitude and
// normalized by the dominant equation terms.
struct FocReport {
  double invest_rel = 0.0;
  double contribution_rel = 0.0;
  double benefit_rel = 0.0;
  bool distortion_applicable = false;  // false when ambiguity aversion is zero
  double distortion_rel_printed = 0.0;
  double distortion_rel_foc = 0.0;
  bool foc_form_is_stationary = false;  // which drift-distortion variant wins
  double invest_curvature = 0.0;            // bracket curvature in the investment (fixed distortion)
  double invest_effective_curvature = 0.0;  // after the adversary reacts; negative when 2k > 1
};

FocReport foc_check(const PlanConfig& config, const FundState& state);

enum class RefinementTarget { ActiveCount, RetiredCount, Liability };

struct RefinementReport {
  double coarse = 0.0;
  double medium = 0.0;
  double fine = 0.0;
  double observed_order = 0.0;
  bool exact = false;  // successive differences at rounding level
};

RefinementReport quadrature_refinement(RefinementTarget target, const PlanConfig& config,
                                       double time, double coarse_step = 0.4);

// Numerical integral of the hazard along the cohort path, for cross-checking
// the printed survival closed form.
double survival_path_integral(const PopulationStructure& pop, double age, double time,
                              std::size_t subintervals = 4096);

// One row of the aggregate verification report.
struct CheckResult {
  std::string name;
  bool passed = false;
  bool informational = false;  // diagnostics that cannot fail
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

VerificationReport run_verification(const PlanConfig& config);

std::string to_json(const VerificationReport& report);
std::string to_text(const VerificationReport& report);

}  // namespace pensim
