#pragma once

#include "pensim/quadrature.hpp"

namespace pensim {

// Age- and time-dependent mortality law. The hazard is
//   base_hazard + makeham_scale * makeham_base^(x - t/longevity_period),
// so the whole population drifts one effective year younger every
// `longevity_period` calendar years. With the trend disabled the exponent is
// just the age x.
struct MortalityModel {
  double base_hazard = 0.0;      // per year
  double makeham_scale = 0.0;    // per year
  double makeham_base = 1.124;   // dimensionless, > 1
  double longevity_period = 4.0; // years per effective year gained; ignored if !longevity_trend
  bool longevity_trend = true;

  void validate() const;
};

double hazard(const MortalityModel& model, double age, double time);

// Maximum attainable age grows linearly: initial_max_age + expansion_rate * t.
struct AgeFrontier {
  double initial_max_age = 100.0;  // years
  double expansion_rate = 0.25;    // years per year, in [0, 1]

  double max_age(double time) const { return initial_max_age + expansion_rate * time; }
  void validate() const;
};

// Malthusian entry of new cohorts: density(t) = initial_density * e^(growth_rate * t).
// t may be negative for cohorts that joined before time zero.
struct EntryProcess {
  double initial_density = 10.0;  // cohort size per year at t = 0
  double growth_rate = -0.005;    // per year, any sign

  double density(double time) const;
  void validate() const;
};

struct PopulationStructure {
  MortalityModel mortality;
  AgeFrontier frontier;
  EntryProcess entry;
  double entry_age = 25.0;       // years
  double retirement_age = 65.0;  // years

  void validate() const;
};

// Survival of the cohort aged `age` at `time` since its entry at entry_age.
// Hard-truncated to 0 at and beyond the moving frontier.
double survival(const PopulationStructure& pop, double age, double time);

// Same closed form without the frontier truncation. This is what the cohort
// integrals use; the truncation is a measure-zero endpoint statement.
double survival_unclamped(const PopulationStructure& pop, double age, double time);

// Density of active members: integral of entry density times survival over
// working ages [entry_age, retirement_age].
double active_count(const PopulationStructure& pop, double time, double age_step = kAgeStep);

// Density of retirees: same integrand over [retirement_age, max_age(time)].
double retired_count(const PopulationStructure& pop, double time, double age_step = kAgeStep);

// Retirees per active member.
double dependency_ratio(const PopulationStructure& pop, double time, double age_step = kAgeStep);

}  // namespace pensim
