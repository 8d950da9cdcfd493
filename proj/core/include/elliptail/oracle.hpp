#pragma once

#include <functional>
#include <span>

#include "elliptail/model.hpp"
#include "elliptail/quadrature.hpp"

namespace elliptail {

/// Intermediates of the angle-domain evaluation of P(Y <= y | X > x) on the
/// standardized, rho >= 0 scale. Integrals are of survival ratios
/// S(.)/S(x_hat), so they are O(1) even far in the tail:
///
///   tail_x      = int_{split}^{pi/2}   S(x/cos u)        / S(x) du
///   tail_y      = int_{-u0}^{split}    S(y/sin(u + u0))  / S(x) du
///   denominator = 2 int_0^{pi/2}       S(x/cos u)        / S(x) du
///
/// with split = atan(t0), t0 = (y/x - rho)/sqrt(1 - rho^2) and
/// u0 = atan(rho / sqrt(1 - rho^2)); then 1 - theta = (tail_x + tail_y) /
/// denominator.
struct ExcessTrace {
  double x_hat = 0.0;
  double y_hat = 0.0;
  double rho = 0.0;
  bool flipped = false;  // rho < 0 was reduced to -rho on (x, -y)
  double t0 = 0.0;
  double u0 = 0.0;
  double split = 0.0;
  double tail_x = 0.0;
  double tail_y = 0.0;
  double denominator = 0.0;
};

struct ExcessResult {
  double theta = 0.0;  // P(Y <= y | X > x)
  double error = 0.0;  // propagated quadrature error estimate
  ExcessTrace trace;
};

/// P(Y <= y | X > x) for a standard elliptical pair whose radial law has the
/// given log survival function, by quadrature in the angle variable. Works
/// for any y and any |rho| < 1 (negative rho via the (X, -Y) flip); requires
/// x_hat > 0. `support_low` is the radius below which the survival equals 1
/// (a kink of the integrand that is used as a split point).
ExcessResult excess_probability_angles(const std::function<double(double)>& log_survival,
                                       double x_hat, double y_hat, double rho,
                                       const QuadratureSettings& settings = {},
                                       double support_low = 0.0);

/// Exact theta(x, y) = P(Y <= y | X > x) on the model's original scale.
/// Throws Error(domain) when the standardized x is not positive.
ExcessResult cond_excess_exact(const EllipticalModel& model, double x, double y,
                               const QuadratureSettings& settings = {});

/// The y with cond_excess_exact(model, x, y) = theta to 1e-9, by bracketed
/// root finding in y.
double cond_quantile_exact(const EllipticalModel& model, double x, double theta,
                           const QuadratureSettings& settings = {});

/// P(X > x) = (1/pi) int_0^{pi/2} S(x_hat / cos u) du for x_hat > 0, and by
/// symmetry otherwise.
double marginal_survival_x(const EllipticalModel& model, double x,
                           const QuadratureSettings& settings = {});

/// Solves P(X > x) = p (tail probability p in (0, 1)) to 1e-11 relative
/// accuracy in probability.
double marginal_quantile_x(const EllipticalModel& model, double p,
                           const QuadratureSettings& settings = {});

enum class ApproxOrder { first, corrected, shifted };

struct Approximation {
  double value = 0.0;
  bool clamped = false;  // corrected order left [0, 1]
};

/// Gaussian approximations of theta on the standardized scale, with
/// z = (y - rho x) / (sqrt(1 - rho^2) sqrt(x psi)):
///   first      Phi(z)
///   corrected  Phi(z) - sqrt(psi / x) rho phi(z) / sqrt(1 - rho^2), clamped
///   shifted    Phi(z') with y replaced by y - rho psi
/// Requires 0 <= rho < 1, x > 0 and psi > 0.
Approximation approx_theta(double rho, double psi_at_x, double x, double y, ApproxOrder order);

/// approx_theta on the model's original scale, using the radial law's
/// auxiliary function and the (X, -Y) flip for negative rho.
Approximation approx_theta(const EllipticalModel& model, double x, double y, ApproxOrder order);

/// Joint approximation P(X <= x + t psi; Y <= rho x + z sqrt(1-rho^2)
/// sqrt(x psi) | X > x) ~ (1 - e^-t) Phi(z). Requires t >= 0.
double approx_joint(double rho, double psi_at_x, double x, double t, double z);

/// max over t in t_grid of |S(x + t psi(x)) / S(x) - e^-t| with psi the law's
/// auxiliary function. Throws Error(unsupported_family) for student.
double gumbel_ratio_error(const RadialLaw& law, double x, std::span<const double> t_grid);

}  // namespace elliptail
