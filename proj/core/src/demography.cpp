#include "pensim/demography.hpp"

#include <cmath>
#include <stdexcept>

namespace pensim {

void MortalityModel::validate() const {
  if (!(base_hazard >= 0.0)) throw std::invalid_argument("mortality: base hazard must be >= 0");
  if (!(makeham_scale >= 0.0)) throw std::invalid_argument("mortality: makeham scale must be >= 0");
  if (!(makeham_base > 1.0)) throw std::invalid_argument("mortality: makeham base must be > 1");
  if (longevity_trend && !(longevity_period > 0.0)) {
    throw std::invalid_argument("mortality: longevity period must be > 0");
  }
}

double hazard(const MortalityModel& model, double age, double time) {
  model.validate();
  if (!(age >= 0.0)) throw std::domain_error("hazard: age must be >= 0");
  const double exponent =
      model.longevity_trend ? age - time / model.longevity_period : age;
  return model.base_hazard + model.makeham_scale * std::pow(model.makeham_base, exponent);
}

void AgeFrontier::validate() const {
  if (!(expansion_rate >= 0.0 && expansion_rate <= 1.0)) {
    throw std::invalid_argument("frontier: expansion rate must lie in [0, 1]");
  }
  if (!(initial_max_age > 0.0)) {
    throw std::invalid_argument("frontier: initial maximum age must be > 0");
  }
}

double EntryProcess::density(double time) const {
  return initial_density * std::exp(growth_rate * time);
}

void EntryProcess::validate() const {
  if (!(initial_density > 0.0)) throw std::invalid_argument("entry: initial density must be > 0");
}

void PopulationStructure::validate() const {
  mortality.validate();
  frontier.validate();
  entry.validate();
  if (!(entry_age < retirement_age && retirement_age < frontier.initial_max_age)) {
    throw std::invalid_argument(
        "population: requires entry age < retirement age < initial maximum age");
  }
}

double survival_unclamped(const PopulationStructure& pop, double age, double time) {
  if (age < pop.entry_age) throw std::domain_error("survival: age below entry age");
  const MortalityModel& m = pop.mortality;
  const double log_base = std::log(m.makeham_base);
  double makeham_term;
  if (m.longevity_trend) {
    const double om = m.longevity_period;
    makeham_term = std::pow(m.makeham_base, age - time / om) -
                   std::pow(m.makeham_base, (1.0 - 1.0 / om) * pop.entry_age + (age - time) / om);
  } else {
    makeham_term = std::pow(m.makeham_base, age) - std::pow(m.makeham_base, pop.entry_age);
  }
  return std::exp(-m.base_hazard * (age - pop.entry_age) - m.makeham_scale / log_base * makeham_term);
}

double survival(const PopulationStructure& pop, double age, double time) {
  if (age >= pop.frontier.max_age(time)) return 0.0;
  return survival_unclamped(pop, age, time);
}

namespace {

double cohort_integral(const PopulationStructure& pop, double time, double lo, double hi,
                       double age_step) {
  if (hi <= lo) return 0.0;
  const auto n = subintervals_for_step(lo, hi, age_step);
  // Integrates the smooth closed form; truncation at the frontier is only an
  // endpoint statement and would spoil the quadrature order.
  return simpson(
      [&](double age) {
        return pop.entry.density(time - (age - pop.entry_age)) *
               survival_unclamped(pop, age, time);
      },
      lo, hi, n);
}

}  // namespace

double active_count(const PopulationStructure& pop, double time, double age_step) {
  return cohort_integral(pop, time, pop.entry_age, pop.retirement_age, age_step);
}

double retired_count(const PopulationStructure& pop, double time, double age_step) {
  return cohort_integral(pop, time, pop.retirement_age, pop.frontier.max_age(time), age_step);
}

double dependency_ratio(const PopulationStructure& pop, double time, double age_step) {
  const double active = active_count(pop, time, age_step);
  if (!(active > 0.0)) throw std::domain_error("dependency ratio: no active members");
  return retired_count(pop, time, age_step) / active;
}

}  // namespace pensim
