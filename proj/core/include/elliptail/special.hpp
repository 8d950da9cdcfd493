#pragma once

namespace elliptail {

inline constexpr double kPi = 3.14159265358979323846;

/// Standard normal density.
double normal_pdf(double z) noexcept;
/// Standard normal distribution function, via erfc so the lower tail keeps
/// full relative precision.
double normal_cdf(double z) noexcept;
/// 1 - normal_cdf(z) without cancellation.
double normal_survival(double z) noexcept;
/// log(1 - normal_cdf(z)), finite far into the upper tail.
double normal_log_survival(double z) noexcept;
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

}  // namespace elliptail
