#include "elliptail/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "elliptail/errors.hpp"

namespace elliptail {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

double normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_survival(double z) noexcept { return 0.5 * std::erfc(z * kInvSqrt2); }

double normal_log_survival(double z) noexcept {
  if (z < 25.0) return std::log(normal_survival(z));
  // Asymptotic Mills ratio series, summed until the terms drop below 1e-17.
  // For z >= 25 the terms shrink by at least (2k + 1) / 625 per step.
  const double z2 = z * z;
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k < 40 && std::abs(term) > 1e-17; ++k) {
    term *= -(2.0 * k - 1.0) / z2;
    series += term;
  }
  return -0.5 * z2 - kLogSqrt2Pi - std::log(z) + std::log(series);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::domain, "normal_quantile requires 0 < p < 1");
  }
  // erfc_inv keeps relative precision for p near 0; one Newton step polishes.
  double z = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
  const double resid = normal_cdf(z) - p;
  const double dens = normal_pdf(z);
  if (dens > std::numeric_limits<double>::min()) z -= resid / dens;
  return z;
}

}  // namespace elliptail
