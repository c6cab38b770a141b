#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace pensim {

// Default age step (years) for the cohort integrals.
inline constexpr double kAgeStep = 0.025;

// Composite Simpson rule on [lo, hi] with n subintervals. n must be even.
// An empty or inverted interval integrates to zero.
template <typename F>
double simpson(F&& f, double lo, double hi, std::size_t n) {
  if (hi <= lo) return 0.0;
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("simpson: subinterval count must be even and >= 2");
  }
  const double h = (hi - lo) / static_cast<double>(n);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < n; i += 2) odd += f(lo + h * static_cast<double>(i));
  for (std::size_t i = 2; i < n; i += 2) even += f(lo + h * static_cast<double>(i));
  return h / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even);
}

// Smallest even subinterval count whose step does not exceed `step`.
inline std::size_t subintervals_for_step(double lo, double hi, double step) {
  if (hi <= lo) return 2;
  if (!(step > 0.0)) throw std::invalid_argument("subintervals_for_step: step must be positive");
  auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  return n;
}

}  // namespace pensim
