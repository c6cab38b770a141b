#include "pensim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pensim/io.hpp"
#include "pensim/rng.hpp"

namespace pensim {

namespace {

struct ShapeDerivatives {
  double curvature;    // P
  double offset;       // Q
  double curvature_t;  // dP/dt with coefficients frozen at t
  double offset_t;     // dQ/dt, reduced form
};

ShapeDerivatives shape_with_derivatives(const PlanConfig& config, double t, const CostTerms& terms) {
  const double r = config.market.risk_free_rate;
  const double w3 = config.weights.discontinuity_weight;
  const double R = inverse_curvature(config, t, terms);
  const auto shape = value_shape(config, t, terms);
  const double R_t = (r + terms.rate_shift) * R - 4.0 * terms.quad_load * w3 * std::exp(-r * t);
  return {shape.curvature, shape.offset, -R_t / (R * R), r * shape.offset - terms.net_flow};
}

struct ValuePartials {
  double v, v_t, v_a, v_aa;
};

ValuePartials value_partials(const PlanConfig& config, double t, double a,
                             const ShapeDerivatives& s) {
  const double w3 = config.weights.discontinuity_weight;
  const double disc = std::exp(-config.market.risk_free_rate * t);
  const double gap = a + s.offset;
  const double r = config.market.risk_free_rate;
  return {
      w3 * disc * s.curvature * gap * gap,
      w3 * disc *
          ((s.curvature_t - r * s.curvature) * gap * gap + 2.0 * s.curvature * s.offset_t * gap),
      2.0 * w3 * disc * s.curvature * gap,
      2.0 * w3 * disc * s.curvature,
  };
}

// The optimized objective bracket at explicit controls. With zero ambiguity
// aversion the entropy penalty is absent and the distortion is not a control.
double objective_bracket(const PlanConfig& config, double t, double a, const ValuePartials& vp,
                         double active, double retired, double invest, double adj_c, double adj_b,
                         double distortion) {
  const auto& mkt = config.market;
  const auto& w = config.weights;
  const double flow = active * (target_contribution(config.rules, t) - adj_c) -
                      retired * (target_benefit(config.rules, t) + adj_b);
  double value = vp.v_t +
                 (invest * (mkt.risky_drift - mkt.risk_free_rate) + a * mkt.risk_free_rate + flow +
                  mkt.risky_volatility * invest * distortion) *
                     vp.v_a +
                 0.5 * invest * invest * mkt.risky_volatility * mkt.risky_volatility * vp.v_aa +
                 (w.contribution_weight * adj_c * adj_c + w.benefit_weight * adj_b * adj_b) *
                     std::exp(-mkt.risk_free_rate * t);
  if (w.ambiguity_aversion > 0.0) {
    value += distortion * distortion * vp.v / (2.0 * w.ambiguity_aversion);
  }
  return value;
}

}  // namespace

OdeSolution solve_value_ode(const PlanConfig& config, double t_eval, CoefficientMode mode,
                            std::size_t steps) {
  config.validate();
  const double T = config.rules.horizon;
  if (t_eval < 0.0 || t_eval > T) throw std::domain_error("solve_value_ode: t_eval outside [0, horizon]");
  const double r = config.market.risk_free_rate;
  const double w3 = config.weights.discontinuity_weight;
  const double a0 = config.rules.initial_fund;
  const double terminal_offset = -a0 * std::exp(r * T);

  OdeSolution out;
  out.method_order = 4;
  if (T - t_eval < 1e-15) {
    out.grid = {T};
    out.curvature = {1.0};
    out.offset = {terminal_offset};
    out.offset_full = {terminal_offset};
    out.curvature_at_eval = 1.0;
    out.offset_at_eval = terminal_offset;
    out.curvature_halved_step = 1.0;
    return out;
  }

  const CostTerms frozen = cost_terms(config, t_eval);

  auto integrate = [&](std::size_t n_steps, bool record, OdeSolution* sink) -> double {
    const double h = (T - t_eval) / static_cast<double>(n_steps);

    // Stage times live on the half grid; cache the cohort counts there for the
    // time-varying mode.
    std::vector<double> g1_half, g2_half;
    if (mode == CoefficientMode::TimeVarying) {
      g1_half.resize(2 * n_steps + 1);
      g2_half.resize(2 * n_steps + 1);
      for (std::size_t j = 0; j <= 2 * n_steps; ++j) {
        const double s = T - static_cast<double>(j) * h / 2.0;
        const CostTerms terms = cost_terms(config, s);
        g1_half[j] = terms.quad_load;
        g2_half[j] = terms.net_flow;
      }
    }
    auto coeff_at = [&](std::size_t half_index, double& g1, double& g2) {
      if (mode == CoefficientMode::TimeVarying) {
        g1 = g1_half[half_index];
        g2 = g2_half[half_index];
      } else {
        g1 = frozen.quad_load;
        g2 = frozen.net_flow;
      }
    };
    const double g3 = frozen.rate_shift;

    struct State {
      double inv_curv, offset_red, offset_full;
    };
    auto deriv = [&](double s, std::size_t half_index, const State& y) -> State {
      double g1 = 0.0, g2 = 0.0;
      coeff_at(half_index, g1, g2);
      const double load = 4.0 * g1 * w3 * std::exp(-r * s);
      const double d_inv = (r + g3) * y.inv_curv - load;
      const double d_red = r * y.offset_red - g2;
      // Unreduced offset equation, written in terms of the reciprocal curvature.
      const double curv = 1.0 / y.inv_curv;
      const double d_full = -((-d_inv / y.inv_curv + (g3 - r) - load * curv) * y.offset_full + g2 +
                              r * y.offset_full);
      return {d_inv, d_red, d_full};
    };

    State y{1.0, terminal_offset, terminal_offset};
    if (record) {
      sink->grid.assign(n_steps + 1, 0.0);
      sink->curvature.assign(n_steps + 1, 0.0);
      sink->offset.assign(n_steps + 1, 0.0);
      sink->offset_full.assign(n_steps + 1, 0.0);
      sink->grid[n_steps] = T;
      sink->curvature[n_steps] = 1.0;
      sink->offset[n_steps] = terminal_offset;
      sink->offset_full[n_steps] = terminal_offset;
      sink->step = h;
    }

    for (std::size_t j = 0; j < n_steps; ++j) {
      const double s = T - static_cast<double>(j) * h;
      const double ds = -h;
      const State k1 = deriv(s, 2 * j, y);
      const State y2{y.inv_curv + 0.5 * ds * k1.inv_curv, y.offset_red + 0.5 * ds * k1.offset_red,
                     y.offset_full + 0.5 * ds * k1.offset_full};
      const State k2 = deriv(s + 0.5 * ds, 2 * j + 1, y2);
      const State y3{y.inv_curv + 0.5 * ds * k2.inv_curv, y.offset_red + 0.5 * ds * k2.offset_red,
                     y.offset_full + 0.5 * ds * k2.offset_full};
      const State k3 = deriv(s + 0.5 * ds, 2 * j + 1, y3);
      const State y4{y.inv_curv + ds * k3.inv_curv, y.offset_red + ds * k3.offset_red,
                     y.offset_full + ds * k3.offset_full};
      const State k4 = deriv(s + ds, 2 * j + 2, y4);
      y.inv_curv += ds / 6.0 * (k1.inv_curv + 2.0 * k2.inv_curv + 2.0 * k3.inv_curv + k4.inv_curv);
      y.offset_red +=
          ds / 6.0 * (k1.offset_red + 2.0 * k2.offset_red + 2.0 * k3.offset_red + k4.offset_red);
      y.offset_full += ds / 6.0 *
                       (k1.offset_full + 2.0 * k2.offset_full + 2.0 * k3.offset_full +
                        k4.offset_full);
      if (!std::isfinite(y.inv_curv) || y.inv_curv <= 0.0) {
        std::ostringstream oss;
        oss << "solve_value_ode: curvature blow-up at t = " << s + ds;
        throw std::runtime_error(oss.str());
      }
      if (record) {
        const std::size_t idx = n_steps - 1 - j;
        sink->grid[idx] = s + ds;
        sink->curvature[idx] = 1.0 / y.inv_curv;
        sink->offset[idx] = y.offset_red;
        sink->offset_full[idx] = y.offset_full;
      }
    }
    return 1.0 / y.inv_curv;
  };

  out.curvature_at_eval = integrate(steps, true, &out);
  out.offset_at_eval = out.offset.front();
  out.curvature_halved_step = integrate(2 * steps, false, nullptr);
  double gap = 0.0;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    const double scale = std::max(1.0, std::abs(out.offset[i]));
    gap = std::max(gap, std::abs(out.offset[i] - out.offset_full[i]) / scale);
  }
  out.max_offset_form_gap = gap;
  return out;
}

ResidualReport hjb_residual(const PlanConfig& config, std::span<const double> times,
                            std::span<const double> assets, DriftDistortionForm form,
                            double shape_perturbation) {
  config.validate();
  ResidualReport report;
  report.form = form;
  report.times.assign(times.begin(), times.end());
  report.assets.assign(assets.begin(), assets.end());
  report.relative.assign(times.size() * assets.size(), std::numeric_limits<double>::quiet_NaN());

  const double r = config.market.risk_free_rate;
  const double phi = config.market.sharpe_ratio();
  const double k = config.weights.ambiguity_aversion;

  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    const double active = active_count(config.population, t);
    const double retired = retired_count(config.population, t);
    const CostTerms terms = cost_terms(config, t, active, retired);
    CostTerms shape_terms = terms;
    shape_terms.rate_shift *= 1.0 + shape_perturbation;
    const ShapeDerivatives s = shape_with_derivatives(config, t, shape_terms);

    for (std::size_t ia = 0; ia < assets.size(); ++ia) {
      const double a = assets[ia];
      const double gap = a + s.offset;
      if (std::abs(gap) < 1e-9 * std::max({1.0, std::abs(a), std::abs(s.offset)})) {
        ++report.skipped;
        continue;
      }
      const ValuePartials vp = value_partials(config, t, a, s);
      double raw;
      if (form == DriftDistortionForm::FocDerived) {
        // Distortion eliminated through its stationarity condition.
        const double denom = k * vp.v_a * vp.v_a / vp.v - vp.v_aa;
        raw = vp.v_t + (a * r + terms.net_flow) * vp.v_a - terms.quad_load * vp.v_a * vp.v_a +
              phi * phi * vp.v_a * vp.v_a / (2.0 * denom);
      } else {
        // Full bracket at the closed-form controls with the printed constant.
        const FundState state{t, a};
        const ValueShape shape{s.curvature, s.offset};
        const double invest = optimal_investment(config, state, shape);
        const auto adj = optimal_adjustments(config, state, shape, active, retired);
        PlanConfig printed = config;
        printed.distortion_form = DriftDistortionForm::AsPrinted;
        const double distortion = k > 0.0 ? worst_case_drift(printed) : 0.0;
        raw = objective_bracket(config, t, a, vp, active, retired, invest, adj.contribution,
                                adj.benefit, distortion);
      }
      const double normalizer = std::max({std::abs(vp.v_t), std::abs(a * r * vp.v_a), 1e-30});
      const double rel = std::abs(raw) / normalizer;
      report.relative[it * assets.size() + ia] = rel;
      report.max_abs = std::max(report.max_abs, std::abs(raw));
      report.max_rel = std::max(report.max_rel, rel);
      ++report.evaluated;
    }
  }
  return report;
}

ResidualReport hjb_residual_default_grid(const PlanConfig& config, DriftDistortionForm form,
                                         double shape_perturbation) {
  std::vector<double> times(21), assets(21);
  const double T = config.rules.horizon;
  const double a0 = config.rules.initial_fund;
  for (int i = 0; i < 21; ++i) {
    times[i] = 0.95 * T * static_cast<double>(i) / 20.0;
    assets[i] = a0 * (0.5 + static_cast<double>(i) / 20.0);
  }
  return hjb_residual(config, times, assets, form, shape_perturbation);
}

FocReport foc_check(const PlanConfig& config, const FundState& state) {
  config.validate();
  const double t = state.time;
  const double a = state.assets;
  const double active = active_count(config.population, t);
  const double retired = retired_count(config.population, t);
  const CostTerms terms = cost_terms(config, t, active, retired);
  const ShapeDerivatives s = shape_with_derivatives(config, t, terms);
  const ValuePartials vp = value_partials(config, t, a, s);
  if (!(vp.v > 0.0)) throw std::domain_error("foc_check: value function vanishes at this state");

  const ValueShape shape{s.curvature, s.offset};
  const double invest = optimal_investment(config, state, shape);
  const auto adj = optimal_adjustments(config, state, shape, active, retired);
  const double k = config.weights.ambiguity_aversion;

  PlanConfig printed = config;
  printed.distortion_form = DriftDistortionForm::AsPrinted;
  PlanConfig foc_form = config;
  foc_form.distortion_form = DriftDistortionForm::FocDerived;
  const double distortion_printed = worst_case_drift(printed);
  const double distortion_foc = worst_case_drift(foc_form);

  const double normalizer = std::max(
      {std::abs(vp.v_t), std::abs(a * config.market.risk_free_rate * vp.v_a),
       std::abs(terms.quad_load * vp.v_a * vp.v_a), 1e-30});

  // Default distortion for the control partials: the stationary form, so the
  // three control gradients are evaluated at an interior saddle of the bracket.
  const double base_distortion = k > 0.0 ? distortion_foc : 0.0;
  auto bracket = [&](double pi, double l1, double l2, double phi_ctl) {
    return objective_bracket(config, t, a, vp, active, retired, pi, l1, l2, phi_ctl);
  };
  auto central = [&](auto&& f, double x0) {
    const double h = 1e-5 * std::max(std::abs(x0), 1.0);
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
  };

  FocReport report;
  report.invest_rel =
      std::abs(central([&](double x) { return bracket(x, adj.contribution, adj.benefit, base_distortion); },
                       invest)) *
      std::max(std::abs(invest), 1.0) / normalizer;
  report.contribution_rel =
      std::abs(central([&](double x) { return bracket(invest, x, adj.benefit, base_distortion); },
                       adj.contribution)) *
      std::max(std::abs(adj.contribution), 1.0) / normalizer;
  report.benefit_rel =
      std::abs(central([&](double x) { return bracket(invest, adj.contribution, x, base_distortion); },
                       adj.benefit)) *
      std::max(std::abs(adj.benefit), 1.0) / normalizer;

  const double vol_sq = config.market.risky_volatility * config.market.risky_volatility;
  report.invest_curvature = vol_sq * vp.v_aa;
  report.invest_effective_curvature = vol_sq * (vp.v_aa - k * vp.v_a * vp.v_a / vp.v);

  if (k > 0.0) {
    report.distortion_applicable = true;
    auto dphi = [&](double phi0) {
      return std::abs(central(
                 [&](double x) { return bracket(invest, adj.contribution, adj.benefit, x); },
                 phi0)) *
             std::max(std::abs(phi0), 1.0) / normalizer;
    };
    report.distortion_rel_printed = dphi(distortion_printed);
    report.distortion_rel_foc = dphi(distortion_foc);
    report.foc_form_is_stationary =
        report.distortion_rel_foc < 1e-8 && report.distortion_rel_foc < report.distortion_rel_printed;
  }
  return report;
}

double survival_path_integral(const PopulationStructure& pop, double age, double time,
                              std::size_t subintervals) {
  if (age < pop.entry_age) throw std::domain_error("survival_path_integral: age below entry age");
  const double duration = age - pop.entry_age;
  if (duration == 0.0) return 1.0;
  const double entry_time = time - duration;
  const double integral = simpson(
      [&](double u) { return hazard(pop.mortality, pop.entry_age + u, entry_time + u); }, 0.0,
      duration, subintervals);
  return std::exp(-integral);
}

RefinementReport quadrature_refinement(RefinementTarget target, const PlanConfig& config,
                                       double time, double coarse_step) {
  config.validate();
  RefinementReport report;
  auto eval = [&](int level) -> double {
    const double factor = std::pow(2.0, level);
    switch (target) {
      case RefinementTarget::ActiveCount: {
        const auto& pop = config.population;
        const auto n = subintervals_for_step(pop.entry_age, pop.retirement_age, coarse_step);
        return simpson(
            [&](double x) {
              return pop.entry.density(time - (x - pop.entry_age)) * survival_unclamped(pop, x, time);
            },
            pop.entry_age, pop.retirement_age, n * static_cast<std::size_t>(factor));
      }
      case RefinementTarget::RetiredCount: {
        const auto& pop = config.population;
        const double hi = pop.frontier.max_age(time);
        const auto n = subintervals_for_step(pop.retirement_age, hi, coarse_step);
        return simpson(
            [&](double x) {
              return pop.entry.density(time - (x - pop.entry_age)) * survival_unclamped(pop, x, time);
            },
            pop.retirement_age, hi, n * static_cast<std::size_t>(factor));
      }
      case RefinementTarget::Liability: {
        LiabilitySteps steps;
        steps.outer_age_step = coarse_step / factor;
        steps.inner_time_subintervals = 250 << level;
        return target_liability(config, steps);
      }
    }
    throw std::logic_error("unreachable");
  };
  report.coarse = eval(0);
  report.medium = eval(1);
  report.fine = eval(2);
  const double d1 = std::abs(report.coarse - report.medium);
  const double d2 = std::abs(report.medium - report.fine);
  const double scale = std::max(1.0, std::abs(report.fine));
  if (d1 < 1e-13 * scale && d2 < 1e-13 * scale) {
    report.exact = true;
    report.observed_order = 16.0;
  } else if (d2 == 0.0) {
    report.exact = true;
    report.observed_order = 16.0;
  } else {
    report.observed_order = std::log2(d1 / d2);
  }
  return report;
}

namespace {

CheckResult make_check(std::string name, bool passed, double value, double threshold,
                       std::string detail = {}) {
  return {std::move(name), passed, false, value, threshold, std::move(detail)};
}

CheckResult make_info(std::string name, double value, std::string detail = {}) {
  return {std::move(name), true, true, value, 0.0, std::move(detail)};
}

}  // namespace

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.informational || c.passed; });
}

VerificationReport run_verification(const PlanConfig& config) {
  config.validate();
  VerificationReport report;
  const double T = config.rules.horizon;
  const double a0 = config.rules.initial_fund;
  const double r = config.market.risk_free_rate;

  // Horizon boundary of the closed forms.
  {
    const auto shape = value_shape(config, T);
    const double q_ref = -a0 * std::exp(r * T);
    report.checks.push_back(make_check("boundary_curvature", std::abs(shape.curvature - 1.0) <= 1e-12,
                                       std::abs(shape.curvature - 1.0), 1e-12));
    const double rel = std::abs(shape.offset - q_ref) / std::abs(q_ref);
    report.checks.push_back(make_check("boundary_offset", rel <= 1e-12, rel, 1e-12));
  }

  // Closed forms against frozen-coefficient backward integration on 21 times.
  {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double t = T * static_cast<double>(i) / 20.0;
      const auto ode = solve_value_ode(config, t, CoefficientMode::FrozenAtEval);
      const auto closed = value_shape(config, t);
      worst = std::max(worst, std::abs(ode.curvature_at_eval - closed.curvature) /
                                  std::abs(closed.curvature));
      worst = std::max(worst,
                       std::abs(ode.offset_at_eval - closed.offset) / std::abs(closed.offset));
    }
    report.checks.push_back(make_check("ode_agreement_21pt", worst < 1e-6, worst, 1e-6));

    const auto ode = solve_value_ode(config, 0.0, CoefficientMode::FrozenAtEval);
    const double cert = std::abs(ode.curvature_at_eval - ode.curvature_halved_step) /
                        std::abs(ode.curvature_at_eval);
    report.checks.push_back(make_check("ode_step_certificate", cert < 1e-8, cert, 1e-8));
    report.checks.push_back(make_check("offset_form_agreement", ode.max_offset_form_gap < 1e-10,
                                       ode.max_offset_form_gap, 1e-10));
  }

  // Optimality-equation residual, baseline and negative control.
  {
    const auto base = hjb_residual_default_grid(config, DriftDistortionForm::FocDerived);
    report.checks.push_back(make_check("residual_baseline", base.max_rel < 1e-6, base.max_rel, 1e-6));
    const auto perturbed =
        hjb_residual_default_grid(config, DriftDistortionForm::FocDerived, 0.01);
    const double floor = std::max(base.max_rel, 1e-16);
    const double ratio = perturbed.max_rel / floor;
    report.checks.push_back(
        make_check("residual_negative_control", ratio >= 100.0, ratio, 100.0));
  }

  // Stationarity at random interior states.
  {
    double worst = 0.0;
    bool foc_wins = true;
    double printed_rel = 0.0, foc_rel = 0.0;
    for (std::uint64_t j = 0; j < 10; ++j) {
      const double t = 0.95 * T * uniform01(counter_bits(424242, j, 0, 0));
      const double a = a0 * (0.5 + uniform01(counter_bits(424242, j, 0, 1)));
      const auto foc = foc_check(config, FundState{t, a});
      worst = std::max({worst, foc.invest_rel, foc.contribution_rel, foc.benefit_rel});
      if (foc.distortion_applicable) {
        foc_wins = foc_wins && foc.foc_form_is_stationary;
        printed_rel = std::max(printed_rel, foc.distortion_rel_printed);
        foc_rel = std::max(foc_rel, foc.distortion_rel_foc);
      }
    }
    report.checks.push_back(make_check("foc_stationarity", worst < 1e-8, worst, 1e-8));
    if (config.weights.ambiguity_aversion > 0.0) {
      report.checks.push_back(make_check("distortion_foc_form_stationary", foc_wins,
                                         foc_rel, 1e-8,
                                         "printed-constant gradient: " + format_g12(printed_rel)));
    }
  }

  // Quadrature refinement.
  {
    const auto active = quadrature_refinement(RefinementTarget::ActiveCount, config, 0.0);
    report.checks.push_back(make_check("refinement_active_order",
                                       active.exact || active.observed_order >= 3.5,
                                       active.observed_order, 3.5));
    const auto retired = quadrature_refinement(RefinementTarget::RetiredCount, config, 0.0);
    report.checks.push_back(make_check("refinement_retired_order",
                                       retired.exact || retired.observed_order >= 3.5,
                                       retired.observed_order, 3.5));
    const auto liab = quadrature_refinement(RefinementTarget::Liability, config, 0.0);
    const double rel = std::abs(liab.fine - liab.medium) / std::max(1.0, std::abs(liab.fine));
    report.checks.push_back(make_check("liability_refinement", rel < 1e-6, rel, 1e-6,
                                       "L = " + format_g12(liab.fine)));
  }

  // Survival diagnostics.
  {
    const auto& pop = config.population;
    double worst_entry = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double t = T * static_cast<double>(i) / 10.0;
      worst_entry = std::max(worst_entry, std::abs(survival(pop, pop.entry_age, t) - 1.0));
    }
    report.checks.push_back(make_check("survival_entry_boundary", worst_entry <= 1e-15,
                                       worst_entry, 1e-15));

    bool monotone = true;
    double prev = survival(pop, pop.entry_age, 0.0);
    for (double x = pop.entry_age + 0.1; x <= pop.frontier.max_age(0.0) + 0.05; x += 0.1) {
      const double cur = survival(pop, x, 0.0);
      if (cur > prev + 1e-15) monotone = false;
      prev = cur;
    }
    report.checks.push_back(make_check("survival_age_monotone", monotone, monotone ? 0.0 : 1.0, 0.0));

    // Differentiating the log of the closed form along the cohort path. With
    // the longevity trend active the printed form reproduces the hazard only
    // up to the (1 - 1/omega) factor on its senescent term; the gap against
    // the raw hazard is reported, not corrected.
    const auto diagonal_hazard = [&](double x, double t) {
      const double entry_t = t - (x - pop.entry_age);
      const double h = 1e-4;
      const double up = std::log(survival_unclamped(pop, x + h, entry_t + (x + h - pop.entry_age)));
      const double dn = std::log(survival_unclamped(pop, x - h, entry_t + (x - h - pop.entry_age)));
      return -(up - dn) / (2.0 * h);
    };
    const MortalityModel& m = pop.mortality;
    double worst_consistency = 0.0;
    double worst_printed_gap = 0.0;
    for (double x : {pop.entry_age + 10.0, pop.retirement_age, pop.retirement_age + 15.0}) {
      const double t = x - pop.entry_age;  // cohort entering at time zero
      const double numeric = diagonal_hazard(x, t);
      const double raw = hazard(m, x, t);
      double effective = raw;
      if (m.longevity_trend) {
        const double scale = 1.0 - 1.0 / m.longevity_period;
        effective = m.base_hazard +
                    scale * m.makeham_scale *
                        std::pow(m.makeham_base, x - t / m.longevity_period);
      }
      worst_consistency = std::max(worst_consistency, std::abs(numeric - effective) / effective);
      worst_printed_gap = std::max(worst_printed_gap, std::abs(numeric - raw) / raw);
    }
    report.checks.push_back(
        make_check("survival_hazard_consistency", worst_consistency < 1e-6, worst_consistency, 1e-6,
                   m.longevity_trend ? "against the (1 - 1/omega)-scaled senescent term" : ""));
    if (m.longevity_trend) {
      report.checks.push_back(make_info("survival_printed_hazard_gap", worst_printed_gap,
                                        "closed-form diagonal derivative vs raw hazard"));
      const double path = survival_path_integral(pop, pop.retirement_age, pop.retirement_age - pop.entry_age);
      const double printed = survival_unclamped(pop, pop.retirement_age, pop.retirement_age - pop.entry_age);
      report.checks.push_back(make_info("survival_printed_vs_path_integral",
                                        std::abs(printed - path) / path,
                                        "relative gap at retirement age for the time-zero cohort"));
    }
  }

  // Offset annuity identity.
  {
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double t = T * static_cast<double>(i) / 10.0;
      const CostTerms terms = cost_terms(config, t);
      const auto shape = value_shape(config, t, terms);
      const double annuity = (1.0 - std::exp(-r * (T - t))) / r;
      const double remark = terms.net_flow * annuity - a0 * std::exp(r * t);
      worst = std::max(worst, std::abs(shape.offset - remark) /
                                  std::max(1.0, std::abs(shape.offset)));
    }
    report.checks.push_back(make_check("offset_annuity_identity", worst < 1e-14, worst, 1e-14));
  }

  report.checks.push_back(make_info("sharpe_ratio", config.market.sharpe_ratio()));

  // Honest time-varying coefficients: diagnostic gap only.
  {
    const auto tv = solve_value_ode(config, 0.0, CoefficientMode::TimeVarying, 2000);
    const auto closed = value_shape(config, 0.0);
    const double gap_p =
        std::abs(tv.curvature_at_eval - closed.curvature) / std::abs(closed.curvature);
    const double gap_q = std::abs(tv.offset_at_eval - closed.offset) / std::abs(closed.offset);
    report.checks.push_back(make_info("timevarying_coefficient_gap", std::max(gap_p, gap_q),
                                      "frozen closed form vs honest time-varying integration"));
  }

  return report;
}

std::string to_json(const VerificationReport& report) {
  nlohmann::json j;
  j["all_passed"] = report.all_passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json row;
    row["name"] = c.name;
    row["passed"] = c.passed;
    row["informational"] = c.informational;
    row["value"] = c.value;
    row["threshold"] = c.threshold;
    if (!c.detail.empty()) row["detail"] = c.detail;
    j["checks"].push_back(row);
  }
  return j.dump(2);
}

std::string to_text(const VerificationReport& report) {
  std::ostringstream oss;
  for (const auto& c : report.checks) {
    const char* tag = c.informational ? "[info]" : (c.passed ? "[PASS]" : "[FAIL]");
    oss << tag << ' ' << c.name << "  value=" << format_g12(c.value);
    if (!c.informational) oss << "  threshold=" << format_g12(c.threshold);
    if (!c.detail.empty()) oss << "  (" << c.detail << ')';
    oss << '\n';
  }
  oss << (report.all_passed() ? "all checks passed" : "SOME CHECKS FAILED") << '\n';
  return oss.str();
}

}  // namespace pensim
