#pragma once

#include <cmath>
#include <string>

#include "elliptail/errors.hpp"

namespace elliptail {

struct Bracket {
  double lower;
  double upper;
};

/// Expands [lo, hi] upward (doubling the width) until f changes sign.
/// `f` must be nondecreasing. Throws NumericFailure after `max_iter`
/// doublings.
template <class F>
Bracket expand_upward(F&& f, double lo, double hi, int max_iter = 200) {
  double width = hi - lo;
  double f_hi = f(hi);
  for (int i = 0; f_hi < 0.0; ++i) {
    if (i >= max_iter || !std::isfinite(hi)) {
      throw NumericFailure("bracket expansion did not find a sign change", lo,
                           hi);
    }
    lo = hi;
    width *= 2.0;
    hi = lo + width;
    f_hi = f(hi);
  }
  return {lo, hi};
}

/// Root of a nondecreasing function on a sign-changing bracket, by the
/// Illinois variant of regula falsi with a bisection safeguard. Stops when
/// |f| <= f_tol or the bracket is narrower than x_tol.
template <class F>
double solve_increasing(F&& f, Bracket b, double f_tol, double x_tol,
                        int max_iter = 200) {
  double a = b.lower;
  double c = b.upper;
  double fa = f(a);
  double fc = f(c);
  if (fa > 0.0 || fc < 0.0) {
    throw NumericFailure("root is not bracketed", a, c);
  }
  if (std::abs(fa) <= f_tol) return a;
  if (std::abs(fc) <= f_tol) return c;
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    double m = (a * fc - c * fa) / (fc - fa);
    // Fall back to bisection when the secant point is useless.
    if (!(m > a && m < c) || it % 8 == 7) m = 0.5 * (a + c);
    const double fm = f(m);
    if (std::abs(fm) <= f_tol || (c - a) <= x_tol) return m;
    if (fm < 0.0) {
      a = m;
      fa = fm;
      if (side == -1) fc *= 0.5;
      side = -1;
    } else {
      c = m;
      fc = fm;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if ((c - a) <= x_tol) return 0.5 * (a + c);
  }
  throw NumericFailure("root finder hit its iteration cap", a, c);
}

}  // namespace elliptail
