#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "../support/gaussian_oracle.hpp"
#include "elliptail/errors.hpp"
#include "elliptail/oracle.hpp"
#include "elliptail/rng.hpp"
#include "elliptail/special.hpp"

using namespace elliptail;
namespace ts = testing_support;

namespace {

std::vector<RadialLaw> all_laws() {
  return {RadialLaw::normal(),        RadialLaw::kotz(1.0),   RadialLaw::kotz(4.0),
          RadialLaw::logis(),         RadialLaw::modified_kotz(), RadialLaw::lognormal(),
          RadialLaw::student(3.0)};
}

std::vector<RadialLaw> gumbel_laws() {
  auto laws = all_laws();
  laws.pop_back();
  return laws;
}

// y on the standardized scale with first-order z score z.
double y_at_z(const EllipticalModel& m, double x, double z) {
  const double rho = m.rho();
  return rho * x + z * std::sqrt(1 - rho * rho) * std::sqrt(x * m.radial().aux_psi(x));
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("gaussian marginal quantile") {
    const auto m = EllipticalModel::standard(0.3, RadialLaw::normal());
    for (double p : {1e-2, 1e-3, 1e-4, 1e-5, 1e-8}) {
      const double x = marginal_quantile_x(m, p);
      CHECK(x == doctest::Approx(-normal_quantile(p)).epsilon(1e-6));
      CHECK(marginal_survival_x(m, x) == doctest::Approx(p).epsilon(1e-9));
    }
  }

  TEST_CASE("marginal median and round trip on every family") {
    for (const auto& law : all_laws()) {
      CAPTURE(law.name());
      const EllipticalModel m(3.0, -1.0, 2.0, 1.0, 0.6, law);
      CHECK(marginal_quantile_x(m, 0.5) == doctest::Approx(3.0).epsilon(1e-9));
      for (double p : {0.3, 1e-3, 1e-6}) {
        const double x = marginal_quantile_x(m, p);
        CHECK(marginal_survival_x(m, x) == doctest::Approx(p).epsilon(1e-9));
      }
      CHECK(marginal_survival_x(m, 3.0 + 1e-9) == doctest::Approx(0.5).epsilon(1e-8));
      CHECK_THROWS_AS(marginal_quantile_x(m, 0.0), Error);
      CHECK_THROWS_AS(marginal_quantile_x(m, 1.0), Error);
    }
  }

  TEST_CASE("zero correlation is symmetric about the location") {
    for (const auto& law : all_laws()) {
      CAPTURE(law.name());
      const EllipticalModel m(1.0, 2.0, 0.5, 3.0, 0.0, law);
      for (double x : {1.1, 2.0, 5.0}) {
        CHECK(cond_excess_exact(m, x, 2.0).theta == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(cond_quantile_exact(m, x, 0.5) == doctest::Approx(2.0).epsilon(1e-8).scale(1.0));
      }
    }
  }

  TEST_CASE("limits in y") {
    const auto m = EllipticalModel::standard(0.7, RadialLaw::logis());
    CHECK(cond_excess_exact(m, 2.0, INFINITY).theta == 1.0);
    CHECK(cond_excess_exact(m, 2.0, -INFINITY).theta == 0.0);
    CHECK(cond_excess_exact(m, 2.0, 1e6).theta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cond_excess_exact(m, 2.0, -1e6).theta == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  }

  TEST_CASE("agrees with an independent gaussian reference") {
    for (double rho : {-0.8, -0.3, 0.0, 0.5, 0.9}) {
      for (double x : {0.2, 1.5, 3.09, 4.26}) {
        for (double dy : {-2.0, -0.5, 0.0, 0.4, 1.5}) {
          const double y = rho * x + dy;
          CAPTURE(rho); CAPTURE(x); CAPTURE(y);
          const auto m = EllipticalModel::standard(rho, RadialLaw::normal());
          CHECK(cond_excess_exact(m, x, y).theta ==
                doctest::Approx(ts::gaussian_theta(rho, x, y)).epsilon(1e-8).scale(1.0));
        }
      }
    }
  }

  TEST_CASE("location and scale enter through standardization") {
    const auto law = RadialLaw::kotz(4.0);
    const EllipticalModel m(10.0, -5.0, 2.0, 0.25, 0.6, law);
    const auto s = EllipticalModel::standard(0.6, law);
    CHECK(cond_excess_exact(m, 10.0 + 2.0 * 1.3, -5.0 + 0.25 * 0.2).theta ==
          doctest::Approx(cond_excess_exact(s, 1.3, 0.2).theta).epsilon(1e-13));
  }

  TEST_CASE("negative correlation uses the flip identity") {
    for (const auto& law : all_laws()) {
      CAPTURE(law.name());
      const auto neg = EllipticalModel::standard(-0.6, law);
      const auto pos = EllipticalModel::standard(0.6, law);
      for (double y : {-2.0, -0.3, 0.0, 1.0}) {
        const auto r = cond_excess_exact(neg, 1.5, y);
        CHECK(r.trace.flipped);
        CHECK(r.theta == doctest::Approx(1.0 - cond_excess_exact(pos, 1.5, -y).theta).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("monotone in y and within [0, 1]") {
    for (const auto& law : all_laws()) {
      for (double rho : {-0.5, 0.0, 0.5, 0.9}) {
        CAPTURE(law.name()); CAPTURE(rho);
        const auto m = EllipticalModel::standard(rho, law);
        const double x = marginal_quantile_x(m, 1e-3);
        double prev = 0.0;
        for (int i = 0; i < 50; ++i) {
          const double y = rho * x - 4.0 + 8.0 * i / 49.0;
          const double t = cond_excess_exact(m, x, y).theta;
          REQUIRE(t >= 0.0);
          REQUIRE(t <= 1.0);
          REQUIRE(t >= prev - 1e-12);
          prev = t;
        }
      }
    }
  }

  TEST_CASE("continuous across the split between the two integration paths") {
    for (const auto& law : all_laws()) {
      for (double rho : {0.3, 0.9}) {
        CAPTURE(law.name()); CAPTURE(rho);
        const auto m = EllipticalModel::standard(rho, law);
        const double x = 2.0;
        const double y0 = rho * x;  // t0 = 0
        const auto at = cond_excess_exact(m, x, y0);
        CHECK(std::abs(at.trace.t0) < 1e-15);
        const double eps = 1e-11;
        CHECK(std::abs(cond_excess_exact(m, x, y0 + eps).theta - at.theta) < 1e-9);
        CHECK(std::abs(cond_excess_exact(m, x, y0 - eps).theta - at.theta) < 1e-9);
      }
    }
  }

  TEST_CASE("trace intermediates") {
    const auto m = EllipticalModel::standard(0.5, RadialLaw::normal());
    const auto r = cond_excess_exact(m, 2.0, 1.7);
    const auto& t = r.trace;
    CHECK(t.u0 == doctest::Approx(std::atan(0.5 / std::sqrt(0.75))).epsilon(1e-15));
    CHECK(t.t0 == doctest::Approx((1.7 / 2.0 - 0.5) / std::sqrt(0.75)).epsilon(1e-14));
    CHECK(t.split == doctest::Approx(std::atan(t.t0)).epsilon(1e-15));
    CHECK(1.0 - (t.tail_x + t.tail_y) / t.denominator == doctest::Approx(r.theta).epsilon(1e-12));
    CHECK(r.error >= 0.0);
    CHECK(r.error < 1e-7);
  }

  TEST_CASE("conditional quantile round trip") {
    for (const auto& law : all_laws()) {
      CAPTURE(law.name());
      const EllipticalModel m(1.0, 2.0, 2.0, 0.5, 0.8, law);
      const double x = marginal_quantile_x(m, 1e-4);
      for (double theta : {0.01, 0.05, 0.5, 0.95, 0.999}) {
        const double y = cond_quantile_exact(m, x, theta);
        CHECK(cond_excess_exact(m, x, y).theta == doctest::Approx(theta).epsilon(1e-8).scale(1.0));
      }
      CHECK_THROWS_AS(cond_quantile_exact(m, x, 0.0), Error);
      CHECK_THROWS_AS(cond_quantile_exact(m, x, 1.0), Error);
    }
  }

  TEST_CASE("conditioning level must lie above the location") {
    const EllipticalModel m(1.0, 0.0, 1.0, 1.0, 0.5, RadialLaw::normal());
    try {
      (void)cond_excess_exact(m, 0.5, 0.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }

  TEST_CASE("first-order approximation basics") {
    CHECK(approx_theta(0.6, 0.3, 2.0, 1.2, ApproxOrder::first).value == 0.5);
    for (double y : {-1.0, 0.3, 2.0}) {
      const double f = approx_theta(0.0, 0.3, 2.0, y, ApproxOrder::first).value;
      CHECK(approx_theta(0.0, 0.3, 2.0, y, ApproxOrder::corrected).value == doctest::Approx(f).epsilon(1e-15));
      CHECK(approx_theta(0.0, 0.3, 2.0, y, ApproxOrder::shifted).value == doctest::Approx(f).epsilon(1e-15));
    }
    const double z = 0.7, rho = 0.5, psi = 0.25, x = 4.0;
    const double y = rho * x + z * std::sqrt(1 - rho * rho) * std::sqrt(x * psi);
    CHECK(approx_theta(rho, psi, x, y, ApproxOrder::first).value == doctest::Approx(normal_cdf(z)).epsilon(1e-14));
    CHECK(approx_theta(rho, psi, x, y, ApproxOrder::corrected).value ==
          doctest::Approx(normal_cdf(z) - std::sqrt(psi / x) * rho * normal_pdf(z) / std::sqrt(1 - rho * rho))
              .epsilon(1e-14));
    const double zs = z - rho * psi / (std::sqrt(1 - rho * rho) * std::sqrt(x * psi));
    CHECK(approx_theta(rho, psi, x, y, ApproxOrder::shifted).value == doctest::Approx(normal_cdf(zs)).epsilon(1e-14));
    CHECK_THROWS_AS(approx_theta(-0.1, psi, x, y, ApproxOrder::first), Error);
    CHECK_THROWS_AS(approx_theta(0.5, 0.0, x, y, ApproxOrder::first), Error);
  }

  TEST_CASE("corrected approximation is clamped and flagged") {
    const auto a = approx_theta(0.99, 4.0, 0.5, 0.5 * 0.99 - 0.2, ApproxOrder::corrected);
    CHECK(a.clamped);
    CHECK(a.value == 0.0);
  }

  TEST_CASE("shifted approximation beats first order for the gaussian law") {
    const auto m = EllipticalModel::standard(0.5, RadialLaw::normal());
    const double x = marginal_quantile_x(m, 1e-5);
    for (double z : {-1.0, 0.0, 1.0}) {
      const double y = y_at_z(m, x, z);
      const double exact = cond_excess_exact(m, x, y).theta;
      CHECK(std::abs(approx_theta(m, x, y, ApproxOrder::shifted).value - exact) <
            std::abs(approx_theta(m, x, y, ApproxOrder::first).value - exact));
    }
  }

  TEST_CASE("approximation error decays with the conditioning level") {
    for (const auto& law : gumbel_laws()) {
      for (double rho : {0.5, 0.9}) {
        CAPTURE(law.name()); CAPTURE(rho);
        const auto m = EllipticalModel::standard(rho, law);
        double prev = INFINITY;
        for (double p : {1e-3, 1e-4, 1e-5}) {
          const double x = marginal_quantile_x(m, p);
          double err = 0.0;
          for (double z : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const double y = y_at_z(m, x, z);
            err = std::max(err, std::abs(approx_theta(m, x, y, ApproxOrder::shifted).value -
                                         cond_excess_exact(m, x, y).theta));
          }
          CHECK(err < prev);
          prev = err;
        }
      }
    }
  }

  TEST_CASE("both corrections beat first order at high correlation") {
    for (const auto& law : gumbel_laws()) {
      CAPTURE(law.name());
      const auto m = EllipticalModel::standard(0.9, law);
      const double x = marginal_quantile_x(m, 1e-5);
      double ef = 0, ec = 0, es = 0;
      for (double z : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double y = y_at_z(m, x, z);
        const double exact = cond_excess_exact(m, x, y).theta;
        ef = std::max(ef, std::abs(approx_theta(m, x, y, ApproxOrder::first).value - exact));
        ec = std::max(ec, std::abs(approx_theta(m, x, y, ApproxOrder::corrected).value - exact));
        es = std::max(es, std::abs(approx_theta(m, x, y, ApproxOrder::shifted).value - exact));
      }
      CHECK(ec < ef);
      CHECK(es < ef);
    }
  }

  TEST_CASE("model-level approximation handles negative correlation") {
    const auto neg = EllipticalModel::standard(-0.5, RadialLaw::normal());
    const auto pos = EllipticalModel::standard(0.5, RadialLaw::normal());
    CHECK(approx_theta(neg, 3.0, -1.0, ApproxOrder::shifted).value ==
          doctest::Approx(1.0 - approx_theta(pos, 3.0, 1.0, ApproxOrder::shifted).value).epsilon(1e-14));
    CHECK_THROWS_AS(approx_theta(EllipticalModel::standard(0.5, RadialLaw::student(3.0)), 3.0, 1.0,
                                 ApproxOrder::first),
                    Error);
  }

  TEST_CASE("joint approximation") {
    CHECK(approx_joint(0.5, 0.3, 3.0, 0.0, 0.4) == 0.0);
    CHECK(approx_joint(0.5, 0.3, 3.0, 60.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(approx_joint(0.5, 0.3, 3.0, -1.0, 0.0), Error);

    // Gaussian, rho = 0.5, x = 4 (tail probability 3e-5), (t, z) = (1, 0):
    // Monte Carlo from the exact conditional law of X given X > x, and the
    // one-dimensional reference integral.
    const double rho = 0.5, x = 4.0, psi = 1.0 / x;
    const double y = rho * x;
    const double approx = approx_joint(rho, psi, x, 1.0, 0.0);
    CHECK(std::abs(approx - ts::gaussian_joint(rho, x, psi, y)) < 0.02);

    CounterRng rng(2024);
    const double tail = ts::Phi_bar(x);
    const int n = 400000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const double xs = -normal_quantile(rng.next_uniform() * tail);
      const double ys = rho * xs + std::sqrt(1 - rho * rho) * -normal_quantile(rng.next_uniform());
      hits += (xs <= x + psi) && (ys <= y);
    }
    CHECK(std::abs(approx - static_cast<double>(hits) / n) < 0.02);
  }

  TEST_CASE("gumbel ratio diagnostic") {
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(gumbel_ratio_error(RadialLaw::kotz(1.0).with_scale(1.0), 3.0, grid) <= 1e-14);
    CHECK(gumbel_ratio_error(RadialLaw::kotz(1.0).with_scale(1.0), 40.0, grid) <= 1e-14);
    CHECK(gumbel_ratio_error(RadialLaw::normal(), 2.0, std::vector<double>{0.0}) == 0.0);
    const auto k4 = RadialLaw::kotz(4.0);
    CHECK(gumbel_ratio_error(k4, k4.quantile(1 - 1e-6), grid) <
          gumbel_ratio_error(k4, k4.quantile(1 - 1e-2), grid));
    CHECK_THROWS_AS(gumbel_ratio_error(RadialLaw::student(3.0), 2.0, grid), Error);
  }
}
