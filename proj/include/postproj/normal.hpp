#pragma once

// Standard normal density and distribution function, with log-space tails.

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace postproj::normal {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

inline double pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z - kLogSqrt2Pi);
}

inline double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

// Density of Normal(mean, variance) at x.
inline double pdf(double x, double mean, double variance) {
  const double sd = std::sqrt(variance);
  return pdf((x - mean) / sd) / sd;
}

inline double log_pdf(double x, double mean, double variance) {
  const double sd = std::sqrt(variance);
  return log_pdf((x - mean) / sd) - std::log(sd);
}

// erfc keeps full relative accuracy in the lower tail, so no cancellation.
inline double cdf(double z) {
  if (z == -std::numeric_limits<double>::infinity()) return 0.0;
  if (z == std::numeric_limits<double>::infinity()) return 1.0;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// log Phi(z). erfc stays accurate down to about -37; the asymptotic
// Mills-ratio series takes over below -30, where it is exact to double precision.
inline double log_cdf(double z) {
  if (z == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  if (z > -30.0) return std::log(cdf(z));
  const double z2 = z * z;
  double series = 1.0;
  double term = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -static_cast<double>(2 * k - 1) / z2;
    series += term;
  }
  return log_pdf(z) - std::log(-z) + std::log(series);
}

// log(1 - Phi(z)).
inline double log_sf(double z) { return log_cdf(-z); }

// Phi(b) - Phi(a) for a < b, evaluated on the side of zero that avoids
// subtracting two numbers close to one.
inline double interval_mass(double a, double b) {
  if (a >= b) return 0.0;
  if (a > 0.0) return cdf(-a) - cdf(-b);
  return cdf(b) - cdf(a);
}

// log(Phi(b) - Phi(a)) for a < b, stable far in either tail.
inline double log_interval_mass(double a, double b) {
  if (a >= b) return -std::numeric_limits<double>::infinity();
  if (a > 0.0) return log_interval_mass(-b, -a);
  // Both arguments on the lower side: Phi(b) - Phi(a) = Phi(b) (1 - Phi(a)/Phi(b)).
  const double lb = log_cdf(b);
  const double la = log_cdf(a);
  return lb + std::log1p(-std::exp(la - lb));
}

inline double quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace postproj::normal
