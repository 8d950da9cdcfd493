#include "elliptail/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "elliptail/errors.hpp"
#include "elliptail/oracle.hpp"
#include "elliptail/special.hpp"

namespace elliptail {

namespace {

constexpr double kE = 2.71828182845904523536;
constexpr double kRhoLimit = 1.0 - 1e-12;

void check_rho(double rho) {
  if (!(std::abs(rho) < kRhoLimit)) {
    throw Error(ErrorKind::degenerate_correlation,
                "estimated correlation is numerically +-1; the sample is degenerate");
  }
}

double standardized_x(const TailFit& fit, double x) {
  const double x_hat = (x - fit.mu_x_hat) / fit.sigma_x_hat;
  if (!(x_hat > 0.0)) {
    throw Error(ErrorKind::domain, "x must lie above the estimated location of X");
  }
  return x_hat;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double e : v) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::m1: return "m1";
    case Method::m2: return "m2";
    case Method::m3: return "m3";
  }
  return "m?";
}

Method parse_method(std::string_view name) {
  if (name == "m1") return Method::m1;
  if (name == "m2") return Method::m2;
  if (name == "m3") return Method::m3;
  throw Error(ErrorKind::invalid_argument, "unknown method '" + std::string(name) + "'");
}

Point TailFit::standardize(Point p) const noexcept {
  const double y = flipped ? -p.y : p.y;
  return {(p.x - mu_x_hat) / sigma_x_hat, (y - mu_y_hat) / sigma_y_hat};
}

double TailFit::unstandardize_y(double y_hat) const noexcept {
  const double y = mu_y_hat + sigma_y_hat * y_hat;
  return flipped ? -y : y;
}

std::vector<double> reconstruct_radii(const PairedSample& sample, const TailFit& fit) {
  check_rho(fit.rho_hat);
  const double rho = fit.rho_hat;
  const double denom = 1.0 - rho * rho;
  std::vector<double> radii;
  radii.reserve(sample.size());
  for (const Point& p : sample.pairs()) {
    const Point s = fit.standardize(p);
    const double resid = s.y - rho * s.x;
    radii.push_back(std::sqrt(s.x * s.x + resid * resid / denom));
  }
  return radii;
}

WeibullTail fit_weibull_tail(std::span<const double> radii, std::size_t k) {
  const std::size_t n = radii.size();
  if (k < 1 || !(static_cast<double>(k) * kE < static_cast<double>(n))) {
    throw Error(ErrorKind::invalid_threshold, "Weibull tail fit requires 1 <= k < n / e");
  }
  // Top k + 1 values in decreasing order: top[i - 1] = R_{n-i+1,n}.
  std::vector<double> top(radii.begin(), radii.end());
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k + 1), top.end(),
                    std::greater<>());
  top.resize(k + 1);
  if (!(top[k] > 0.0)) {
    throw Error(ErrorKind::degenerate_tail, "top order statistics must be strictly positive");
  }
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double sum_loglog = 0.0;
  double sum_log_r = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    sum_loglog += std::log(std::log(nd / static_cast<double>(i)));
    sum_log_r += std::log(top[i - 1]);
  }
  const double num = sum_loglog / kd - std::log(std::log(nd / kd));
  const double den = sum_log_r / kd - std::log(top[k]);
  if (!(den > 0.0)) {
    throw Error(ErrorKind::degenerate_tail, "top order statistics are all equal");
  }
  const double beta = num / den;
  double sum_c = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    sum_c += std::log(nd / static_cast<double>(i)) / std::pow(top[i - 1], beta);
  }
  return {beta, sum_c / kd};
}

TailFit fit_all(const PairedSample& sample, double k_fraction) {
  const std::size_t n = sample.size();
  if (n < 20) throw Error(ErrorKind::insufficient_data, "fit_all requires n >= 20");
  if (!(k_fraction > 0.0 && k_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "k_fraction must lie in (0, 1)");
  }
  TailFit fit;
  fit.n = n;
  const std::vector<double> xs = sample.xs();
  std::vector<double> ys = sample.ys();
  double rho = kendall_rho(sample);
  if (rho < 0.0) {
    fit.flipped = true;
    rho = -rho;
    for (double& y : ys) y = -y;
  }
  check_rho(rho);
  fit.rho_hat = rho;
  fit.mu_x_hat = mean_of(xs);
  fit.mu_y_hat = mean_of(ys);
  fit.sigma_x_hat = sd_of(xs, fit.mu_x_hat);
  fit.sigma_y_hat = sd_of(ys, fit.mu_y_hat);
  if (!(fit.sigma_x_hat > 0.0) || !(fit.sigma_y_hat > 0.0)) {
    throw Error(ErrorKind::insufficient_data, "sample has zero variance in a coordinate");
  }

  std::vector<double> x_hat(n);
  for (std::size_t i = 0; i < n; ++i) x_hat[i] = (xs[i] - fit.mu_x_hat) / fit.sigma_x_hat;
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
  std::nth_element(x_hat.begin(), x_hat.begin() + static_cast<std::ptrdiff_t>(rank - 1), x_hat.end());
  fit.x_hat_q90 = x_hat[rank - 1];

  const auto max_k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / kE)) - 1;
  const auto raw_k = static_cast<std::size_t>(std::floor(k_fraction * static_cast<double>(n)));
  fit.k_n = std::clamp<std::size_t>(raw_k, 1, max_k);

  const std::vector<double> radii = reconstruct_radii(sample, fit);
  const WeibullTail tail = fit_weibull_tail(radii, fit.k_n);
  if (!(tail.beta > 0.0) || !(tail.c > 0.0) || !std::isfinite(tail.beta) || !std::isfinite(tail.c)) {
    throw Error(ErrorKind::degenerate_tail, "Weibull tail fit produced a non-positive parameter");
  }
  fit.beta_hat = tail.beta;
  fit.c_hat = tail.c;
  return fit;
}

double psi_hat(const TailFit& fit, double x_hat) {
  if (!(x_hat > 0.0)) throw Error(ErrorKind::domain, "psi_hat requires x > 0");
  return std::pow(x_hat, 1.0 - fit.beta_hat) / (fit.c_hat * fit.beta_hat);
}

Estimate theta_hat(const TailFit& fit, double x, double y, Method method,
                   const QuadratureSettings& settings) {
  check_rho(fit.rho_hat);
  const double x_hat = standardized_x(fit, x);
  const double y_hat = fit.standardize({x, y}).y;
  Estimate est;
  est.low_threshold = x_hat < fit.x_hat_q90;
  const double rho = fit.rho_hat;
  switch (method) {
    case Method::m1:
    case Method::m2: {
      const double psi = psi_hat(fit, x_hat);
      const double shift = method == Method::m2 ? rho * psi : 0.0;
      const double z = (y_hat - rho * x_hat - shift) / (std::sqrt(1.0 - rho * rho) * std::sqrt(x_hat * psi));
      est.value = normal_cdf(z);
      break;
    }
    case Method::m3: {
      // Weibull tail S(r) = exp(-c r^beta): the survival ratio inside the
      // angle integrals is exactly exp(-c ((b/v)^beta - a^beta)).
      const double beta = fit.beta_hat;
      const double c = fit.c_hat;
      auto log_s = [beta, c](double r) { return r > 0.0 ? -c * std::pow(r, beta) : 0.0; };
      const ExcessResult r = excess_probability_angles(log_s, x_hat, y_hat, rho, settings);
      est.value = r.theta;
      est.quadrature_error = r.error;
      break;
    }
  }
  if (fit.flipped) est.value = 1.0 - est.value;
  return est;
}

Estimate quantile_hat(const TailFit& fit, double x, double theta, Method method) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorKind::domain, "quantile_hat requires 0 < theta < 1");
  }
  if (method == Method::m3) {
    throw Error(ErrorKind::invalid_argument, "quantile estimation is defined for m1 and m2 only");
  }
  check_rho(fit.rho_hat);
  const double x_hat = standardized_x(fit, x);
  const double rho = fit.rho_hat;
  const double psi = psi_hat(fit, x_hat);
  // On the flipped scale theta(x, y) = 1 - theta'(x, -y).
  const double level = fit.flipped ? 1.0 - theta : theta;
  double y_hat = rho * x_hat + std::sqrt(1.0 - rho * rho) * std::sqrt(x_hat * psi) * normal_quantile(level);
  if (method == Method::m2) y_hat += rho * psi;
  Estimate est;
  est.value = fit.unstandardize_y(y_hat);
  est.low_threshold = x_hat < fit.x_hat_q90;
  return est;
}

}  // namespace elliptail
