#include "elliptail/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "elliptail/errors.hpp"

namespace elliptail {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk21(const std::function<double(double)>& f, double a, double b) {
  // Boost stores the non-negative half of the symmetric rules. Kronrod
  // nodes at odd positions coincide with the Gauss nodes.
  static const auto& xk = Kronrod::abscissa();
  static const auto& wk = Kronrod::weights();
  static const auto& wg = Gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(center);
  double kronrod = wk[0] * f0;
  double gauss = 0.0;  // 10-point rule has no center node
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = half * xk[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += wk[i] * pair;
    if (i % 2 == 1) gauss += wg[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 10) {
    throw Error(ErrorKind::invalid_argument,
                "quadrature settings need positive tolerances and max_subdivisions >= 10");
  }
}

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureSettings& settings) {
  settings.validate();
  if (a == b) return {};
  if (b < a) {
    QuadratureResult r = integrate(f, b, a, settings);
    r.value = -r.value;
    return r;
  }

  std::priority_queue<Segment> heap;
  Segment first = gk21(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int subdivisions = 0;

  while (error > std::max(settings.abs_tol, settings.rel_tol * std::abs(total))) {
    if (subdivisions >= settings.max_subdivisions) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge on [" << a << ", " << b
          << "]: value " << total << ", error estimate " << error;
      throw NumericFailure(msg.str(), total - error, total + error);
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Segment can no longer be split in double precision.
      break;
    }
    const Segment left = gk21(f, worst.a, mid);
    const Segment right = gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum from the segments so the running update does not accumulate
  // cancellation error.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, subdivisions};
}

}  // namespace elliptail
