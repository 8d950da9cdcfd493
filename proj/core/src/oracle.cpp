#include "elliptail/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "elliptail/errors.hpp"
#include "elliptail/root_find.hpp"
#include "elliptail/special.hpp"

namespace elliptail {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

// Integrates over [a, b] (either orientation), splitting at the given
// interior points where the integrand has kinks.
QuadratureResult integrate_split(const std::function<double(double)>& f, double a, double b,
                                 std::vector<double> cuts, const QuadratureSettings& q) {
  const double sign = b < a ? -1.0 : 1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::erase_if(cuts, [&](double c) { return !(c > lo && c < hi); });
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), lo);
  cuts.push_back(hi);
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const QuadratureResult piece = integrate(f, cuts[i], cuts[i + 1], q);
    total.value += piece.value;
    total.error += piece.error;
    total.subdivisions += piece.subdivisions;
  }
  total.value *= sign;
  return total;
}

// Angles u in (-pi/2, pi/2) where x / cos u crosses the support boundary.
std::vector<double> x_kinks(double x_hat, double support_low) {
  if (!(support_low > x_hat)) return {};
  const double u = std::acos(x_hat / support_low);
  return {-u, u};
}

// Angles where y / sin(u + u0) crosses the support boundary.
std::vector<double> y_kinks(double y_hat, double u0, double support_low) {
  if (!(support_low > 0.0) || !(std::abs(y_hat) < support_low)) return {};
  const double a = std::asin(y_hat / support_low);
  return {a - u0, kPi - a - u0, -kPi - a - u0};
}

// Log of P(X > x) for a standard pair, x_hat > 0.
double log_marginal_survival(const RadialLaw& law, double x_hat, const QuadratureSettings& q) {
  const double log_sx = law.log_survival(x_hat);
  if (!std::isfinite(log_sx)) {
    throw NumericFailure("radial survival underflows at the requested x", x_hat, x_hat);
  }
  auto fx = [&](double u) {
    const double c = std::cos(u);
    if (!(c > 0.0)) return 0.0;
    return std::exp(law.log_survival(x_hat / c) - log_sx);
  };
  const QuadratureResult r =
      integrate_split(fx, 0.0, kHalfPi, x_kinks(x_hat, law.support_low()), q);
  return log_sx + std::log(r.value) - std::log(kPi);
}

double standardized_x(const EllipticalModel& model, double x) {
  const double x_hat = (x - model.mu_x()) / model.sigma_x();
  if (!(x_hat > 0.0)) {
    throw Error(ErrorKind::domain, "conditioning level must lie above the location of X");
  }
  return x_hat;
}

}  // namespace

ExcessResult excess_probability_angles(const std::function<double(double)>& log_survival,
                                       double x_hat, double y_hat, double rho,
                                       const QuadratureSettings& settings, double support_low) {
  if (!(x_hat > 0.0) || !std::isfinite(x_hat) || std::isnan(y_hat)) {
    throw Error(ErrorKind::domain, "conditional excess requires a positive standardized x");
  }
  if (!(std::abs(rho) < 1.0)) {
    throw Error(ErrorKind::degenerate_correlation, "conditional excess requires |rho| < 1");
  }
  if (rho < 0.0) {
    ExcessResult r =
        excess_probability_angles(log_survival, x_hat, -y_hat, -rho, settings, support_low);
    r.theta = 1.0 - r.theta;
    r.trace.flipped = true;
    return r;
  }
  if (std::isinf(y_hat)) {
    ExcessResult r;
    r.theta = y_hat > 0.0 ? 1.0 : 0.0;
    r.trace.x_hat = x_hat;
    r.trace.y_hat = y_hat;
    r.trace.rho = rho;
    return r;
  }

  const double root = std::sqrt(1.0 - rho * rho);
  const double u0 = std::atan(rho / root);
  const double t0 = (y_hat / x_hat - rho) / root;
  const double split = std::atan(t0);

  const double log_sx = log_survival(x_hat);
  if (!std::isfinite(log_sx)) {
    throw NumericFailure("radial survival underflows at the requested x", x_hat, x_hat);
  }
  auto fx = [&](double u) {
    const double c = std::cos(u);
    if (!(c > 0.0)) return 0.0;
    return std::exp(log_survival(x_hat / c) - log_sx);
  };
  auto fy = [&](double u) {
    const double r = y_hat / std::sin(u + u0);
    if (!(r > 0.0) || !std::isfinite(r)) return 0.0;
    return std::exp(log_survival(r) - log_sx);
  };

  const auto xk = x_kinks(x_hat, support_low);
  const QuadratureResult half = integrate_split(fx, 0.0, kHalfPi, xk, settings);
  const QuadratureResult inner = integrate_split(fx, 0.0, split, xk, settings);
  const QuadratureResult ypart =
      integrate_split(fy, -u0, split, y_kinks(y_hat, u0, support_low), settings);

  ExcessResult out;
  const double c = half.value;
  out.theta = std::clamp((c + inner.value - ypart.value) / (2.0 * c), 0.0, 1.0);
  out.error = (half.error + inner.error + ypart.error) / (2.0 * c) + out.theta * half.error / c;
  out.trace = {x_hat, y_hat, rho, false, t0, u0, split, c - inner.value, ypart.value, 2.0 * c};
  return out;
}

ExcessResult cond_excess_exact(const EllipticalModel& model, double x, double y,
                               const QuadratureSettings& settings) {
  const double x_hat = standardized_x(model, x);
  const double y_hat = (y - model.mu_y()) / model.sigma_y();
  const RadialLaw& law = model.radial();
  return excess_probability_angles([&law](double r) { return law.log_survival(r); }, x_hat,
                                   y_hat, model.rho(), settings, law.support_low());
}

double cond_quantile_exact(const EllipticalModel& model, double x, double theta,
                           const QuadratureSettings& settings) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorKind::domain, "conditional quantile requires 0 < theta < 1");
  }
  const double x_hat = standardized_x(model, x);
  const RadialLaw& law = model.radial();
  auto log_s = [&law](double r) { return law.log_survival(r); };
  auto f = [&](double y_hat) {
    return excess_probability_angles(log_s, x_hat, y_hat, model.rho(), settings,
                                     law.support_low())
               .theta -
           theta;
  };
  const double center = model.rho() * x_hat;
  double width = 1.0;
  double lo = center - width;
  for (int i = 0; f(lo) > 0.0; ++i) {
    if (i > 200) throw NumericFailure("no lower bracket for the conditional quantile", lo, center);
    width *= 2.0;
    lo = center - width;
  }
  const Bracket b = expand_upward(f, lo, center + 1.0, 200);
  const double y_hat = solve_increasing(f, b, 1e-10, 1e-13 * (1.0 + std::abs(center)), 200);
  return model.mu_y() + model.sigma_y() * y_hat;
}

double marginal_survival_x(const EllipticalModel& model, double x,
                           const QuadratureSettings& settings) {
  const double x_hat = (x - model.mu_x()) / model.sigma_x();
  if (x_hat == 0.0) return 0.5;
  if (x_hat < 0.0) {
    return 1.0 - std::exp(log_marginal_survival(model.radial(), -x_hat, settings));
  }
  return std::exp(log_marginal_survival(model.radial(), x_hat, settings));
}

double marginal_quantile_x(const EllipticalModel& model, double p,
                           const QuadratureSettings& settings) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::domain, "marginal quantile requires 0 < p < 1");
  }
  if (p == 0.5) return model.mu_x();
  const double tail = std::min(p, 1.0 - p);
  const double log_tail = std::log(tail);
  const RadialLaw& law = model.radial();
  auto f = [&](double x_hat) {
    if (x_hat == 0.0) return log_tail - std::log(0.5);
    return log_tail - log_marginal_survival(law, x_hat, settings);
  };
  const Bracket b = expand_upward(f, 0.0, 1.0, 200);
  double x_hat = solve_increasing(f, b, 1e-12, 1e-15 * b.upper, 200);
  if (p > 0.5) x_hat = -x_hat;
  return model.mu_x() + model.sigma_x() * x_hat;
}

Approximation approx_theta(double rho, double psi_at_x, double x, double y, ApproxOrder order) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorKind::domain, "approximations require 0 <= rho < 1");
  }
  if (!(x > 0.0) || !(psi_at_x > 0.0)) {
    throw Error(ErrorKind::domain, "approximations require x > 0 and psi(x) > 0");
  }
  const double root = std::sqrt(1.0 - rho * rho);
  const double spread = root * std::sqrt(x * psi_at_x);
  const double z = (y - rho * x) / spread;
  switch (order) {
    case ApproxOrder::first: return {normal_cdf(z), false};
    case ApproxOrder::corrected: {
      const double raw = normal_cdf(z) - std::sqrt(psi_at_x / x) * rho * normal_pdf(z) / root;
      const double value = std::clamp(raw, 0.0, 1.0);
      return {value, value != raw};
    }
    case ApproxOrder::shifted:
      return {normal_cdf((y - rho * x - rho * psi_at_x) / spread), false};
  }
  return {};
}

Approximation approx_theta(const EllipticalModel& model, double x, double y, ApproxOrder order) {
  const double x_hat = standardized_x(model, x);
  const double y_hat = (y - model.mu_y()) / model.sigma_y();
  const double psi = model.radial().aux_psi(x_hat);
  if (model.rho() < 0.0) {
    Approximation a = approx_theta(-model.rho(), psi, x_hat, -y_hat, order);
    a.value = 1.0 - a.value;
    return a;
  }
  return approx_theta(model.rho(), psi, x_hat, y_hat, order);
}

double approx_joint(double rho, double psi_at_x, double x, double t, double z) {
  if (!(t >= 0.0)) throw Error(ErrorKind::domain, "approx_joint requires t >= 0");
  if (!(rho >= 0.0 && rho < 1.0) || !(x > 0.0) || !(psi_at_x > 0.0)) {
    throw Error(ErrorKind::domain, "approx_joint requires 0 <= rho < 1, x > 0, psi > 0");
  }
  return -std::expm1(-t) * normal_cdf(z);
}

double gumbel_ratio_error(const RadialLaw& law, double x, std::span<const double> t_grid) {
  const double psi = law.aux_psi(x);
  const double log_sx = law.log_survival(x);
  double worst = 0.0;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw Error(ErrorKind::domain, "gumbel_ratio_error requires t >= 0");
    const double ratio = std::exp(law.log_survival(x + t * psi) - log_sx);
    worst = std::max(worst, std::abs(ratio - std::exp(-t)));
  }
  return worst;
}

}  // namespace elliptail
