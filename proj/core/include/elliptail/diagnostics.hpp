#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace elliptail {

struct LogisticFit {
  double location = 0.0;
  double scale = 1.0;
  int iterations = 0;
};

double logistic_cdf(double x, double location, double scale) noexcept;

/// Maximum-likelihood logistic fit by damped Newton iteration in
/// (location, log scale). Converges when the scale-free gradient norm drops
/// below 1e-10; throws NumericFailure after 100 iterations. Requires n >= 10.
LogisticFit fit_logistic(std::span<const double> data);

/// sup |F_n - F| for the fitted logistic law.
double ks_statistic(std::span<const double> data, const LogisticFit& fit);

struct MarginalFitReport {
  std::string family = "logistic";
  double location = 0.0;
  double scale = 1.0;
  double ks_statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_mc = 0;
};

/// Kolmogorov-Smirnov test of the logistic fit with estimated parameters.
/// Each of the n_mc replicates draws n points from the fitted law, refits,
/// and recomputes the statistic; p = (1 + #{D_j >= D}) / (n_mc + 1).
/// Replicate j uses derive_seed(seed, j), so `jobs` does not change the
/// result. Requires n_mc >= 99.
MarginalFitReport ks_test_mc(std::span<const double> data, const LogisticFit& fit,
                             std::size_t n_mc, std::uint64_t seed, unsigned jobs = 1);

struct TailShapeReport {
  double threshold = 0.0;
  std::size_t n_excess = 0;
  double xi_hat = 0.0;
  double sigma_hat = 0.0;
  double xi_ci_low = 0.0;
  double xi_ci_high = 0.0;
  double log_likelihood = 0.0;
  bool rapid_variation_ok = false;  // 0 lies inside the 95% profile interval
  /// The elliptical-symmetry check that usually accompanies this report is
  /// not implemented.
  bool symmetry_test_run = false;
};

inline constexpr double kDefaultTailFraction = 0.15;

/// Generalized Pareto log-likelihood of excesses for shape xi and scale
/// sigma; -inf outside the support.
double gpd_log_likelihood(std::span<const double> excesses, double xi, double sigma);

/// max over sigma of gpd_log_likelihood for fixed xi. Writes the maximizing
/// sigma to `sigma_out` when non-null.
double gpd_profile_log_likelihood(std::span<const double> excesses, double xi,
                                  double* sigma_out = nullptr);

/// GPD fit to the excesses over the empirical (1 - tail_fraction)-quantile,
/// with the 95% profile-likelihood interval for xi (xi grid step 0.005 on
/// [-0.45, 1.5], endpoints refined by bisection to 1e-4). Requires at least
/// 10 excesses.
TailShapeReport fit_gpd_profile(std::span<const double> data,
                                double tail_fraction = kDefaultTailFraction);

}  // namespace elliptail
