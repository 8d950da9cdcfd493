#pragma once

#include <functional>

namespace elliptail {

struct QuadratureSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 10000;

  /// Throws Error(invalid_argument) unless tolerances are positive and
  /// max_subdivisions >= 10.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive Gauss-Kronrod (G10/K21) integration of f over [a, b].
/// The interval with the largest error estimate is bisected until the
/// summed estimate drops below max(abs_tol, rel_tol * |value|). Reversed
/// bounds give the negated integral. Throws NumericFailure carrying the
/// achieved error when the subdivision budget runs out.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureSettings& settings = {});

}  // namespace elliptail
