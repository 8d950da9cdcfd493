#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "elliptail/model.hpp"
#include "elliptail/quadrature.hpp"

namespace elliptail {

enum class Method { m1, m2, m3 };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

/// Kendall's tau-a, (concordant - discordant) / C(n, 2), with ties counting
/// zero. Uses Knight's O(n log n) merge-sort count above 5000 pairs.
double kendall_tau(std::span<const Point> pairs);
double kendall_tau_naive(std::span<const Point> pairs);
double kendall_tau_merge(std::span<const Point> pairs);

/// sin(pi tau / 2).
double kendall_rho(const PairedSample& sample);

/// Everything the estimators need from a sample. When `flipped` is set the
/// fit was made on (X, -Y), so mu_y_hat and rho_hat describe -Y.
struct TailFit {
  double mu_x_hat = 0.0;
  double mu_y_hat = 0.0;
  double sigma_x_hat = 1.0;
  double sigma_y_hat = 1.0;
  double rho_hat = 0.0;
  double beta_hat = 1.0;
  double c_hat = 1.0;
  std::size_t k_n = 0;
  std::size_t n = 0;
  bool flipped = false;
  /// Empirical 0.9-quantile of the standardized X sample; x levels below it
  /// are flagged as low-threshold.
  double x_hat_q90 = 0.0;

  /// Standardization of an original-scale pair, including the flip.
  Point standardize(Point p) const noexcept;
  /// Inverse of standardize for the y coordinate.
  double unstandardize_y(double y_hat) const noexcept;
};

struct WeibullTail {
  double beta = 0.0;
  double c = 0.0;
};

/// R_hat_i = sqrt(x_i^2 + (y_i - rho x_i)^2 / (1 - rho^2)) on the fit's
/// standardized scale. Throws Error(degenerate_correlation) for |rho| = 1.
std::vector<double> reconstruct_radii(const PairedSample& sample, const TailFit& fit);

/// Slope of the Weibull quantile plot over the top k order statistics and
/// the matching c estimate. Requires 1 <= k < n / e and strictly positive top
/// k + 1 radii.
WeibullTail fit_weibull_tail(std::span<const double> radii, std::size_t k);

inline constexpr double kDefaultKFraction = 0.10;

/// Moment standardization, Kendall correlation (with the flip for negative
/// values), radius reconstruction and the Weibull tail fit with
/// k_n = floor(k_fraction n) clamped to [1, ceil(n/e) - 1]. Requires n >= 20.
TailFit fit_all(const PairedSample& sample, double k_fraction = kDefaultKFraction);

/// x^(1 - beta) / (c beta) at a standardized x > 0.
double psi_hat(const TailFit& fit, double x_hat);

struct Estimate {
  double value = 0.0;
  bool low_threshold = false;  // standardized x below the sample's 0.9-quantile
  double quadrature_error = 0.0;
};

/// Estimate of P(Y <= y | X > x) at original-scale (x, y).
Estimate theta_hat(const TailFit& fit, double x, double y, Method method,
                   const QuadratureSettings& settings = {});

/// Estimate of the conditional quantile y with theta(x, y) = theta. Only m1
/// and m2 are defined.
Estimate quantile_hat(const TailFit& fit, double x, double theta, Method method);

}  // namespace elliptail
