#include "elliptail/radial.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "elliptail/errors.hpp"
#include "elliptail/quadrature.hpp"
#include "elliptail/rng.hpp"
#include "elliptail/root_find.hpp"
#include "elliptail/special.hpp"

namespace elliptail {

namespace {

constexpr double kE = 2.71828182845904523536;
// modkotz lives on s >= e^(-2/3); the log-survival offset makes S(s0) = 1.
const double kModKotzLow = std::exp(-2.0 / 3.0);
constexpr double kModKotzOffset = 2.0 / (3.0 * kE);
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double modkotz_second_moment() {
  static const double value = [] {
    auto integrand = [](double s) {
      return 2.0 * s * std::exp(-std::pow(s, 1.5) * std::log(s) - kModKotzOffset);
    };
    QuadratureSettings q;
    q.rel_tol = 1e-13;
    q.abs_tol = 1e-15;
    return kModKotzLow * kModKotzLow + integrate(integrand, kModKotzLow, 20.0, q).value;
  }();
  return value;
}

}  // namespace

std::string_view to_string(RadialFamily family) noexcept {
  switch (family) {
    case RadialFamily::normal: return "normal";
    case RadialFamily::kotz: return "kotz";
    case RadialFamily::logis: return "logis";
    case RadialFamily::modkotz: return "modkotz";
    case RadialFamily::lognor: return "lognor";
    case RadialFamily::student: return "student";
  }
  return "unknown";
}

RadialFamily parse_radial_family(std::string_view name) {
  if (name == "normal" || name == "gauss" || name == "gaussian") return RadialFamily::normal;
  if (name == "kotz") return RadialFamily::kotz;
  if (name == "logis") return RadialFamily::logis;
  if (name == "modkotz") return RadialFamily::modkotz;
  if (name == "lognor") return RadialFamily::lognor;
  if (name == "student") return RadialFamily::student;
  throw Error(ErrorKind::invalid_argument, "unknown radial family '" + std::string(name) + "'");
}

RadialLaw RadialLaw::normal() {
  RadialLaw law(RadialFamily::normal, 0.0, 1.0);
  law.scale_ = law.standard_scale();
  return law;
}

RadialLaw RadialLaw::kotz(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::invalid_argument, "kotz requires beta > 0");
  }
  RadialLaw law(RadialFamily::kotz, beta, 1.0);
  law.scale_ = law.standard_scale();
  return law;
}

RadialLaw RadialLaw::logis() {
  RadialLaw law(RadialFamily::logis, 0.0, 1.0);
  law.scale_ = law.standard_scale();
  return law;
}

RadialLaw RadialLaw::modified_kotz() {
  RadialLaw law(RadialFamily::modkotz, 1.5, 1.0);
  law.scale_ = law.standard_scale();
  return law;
}

RadialLaw RadialLaw::lognormal() {
  RadialLaw law(RadialFamily::lognor, 0.0, 1.0);
  law.scale_ = law.standard_scale();
  return law;
}

RadialLaw RadialLaw::student(double nu) {
  if (!(nu > 2.0) || !std::isfinite(nu)) {
    throw Error(ErrorKind::invalid_argument, "student requires nu > 2 for a finite second moment");
  }
  RadialLaw law(RadialFamily::student, nu, 1.0);
  law.scale_ = law.standard_scale();
  return law;
}

RadialLaw RadialLaw::by_name(std::string_view name, double param) {
  switch (parse_radial_family(name)) {
    case RadialFamily::normal: return normal();
    case RadialFamily::kotz: return kotz(param);
    case RadialFamily::logis: return logis();
    case RadialFamily::modkotz: return modified_kotz();
    case RadialFamily::lognor: return lognormal();
    case RadialFamily::student: return student(param);
  }
  throw Error(ErrorKind::invalid_argument, "unknown radial family");
}

RadialLaw RadialLaw::with_scale(double scale) const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::invalid_argument, "radial scale must be positive");
  }
  RadialLaw law = *this;
  law.scale_ = scale;
  return law;
}

std::string RadialLaw::name() const {
  std::ostringstream out;
  out << to_string(family_);
  if (family_ == RadialFamily::kotz || family_ == RadialFamily::student) {
    out << '(' << param_ << ')';
  }
  return out.str();
}

double RadialLaw::unit_second_moment() const {
  switch (family_) {
    case RadialFamily::normal: return 2.0;
    case RadialFamily::kotz: return std::tgamma(1.0 + 2.0 / param_);
    case RadialFamily::logis: return 2.0 * std::log(2.0);
    case RadialFamily::modkotz: return modkotz_second_moment();
    case RadialFamily::lognor: return kE * kE;
    case RadialFamily::student: return 2.0 * param_ / (param_ - 2.0);
  }
  return 2.0;
}

double RadialLaw::standard_scale() const { return std::sqrt(2.0 / unit_second_moment()); }

double RadialLaw::unit_support_low() const noexcept {
  return family_ == RadialFamily::modkotz ? kModKotzLow : 0.0;
}

double RadialLaw::support_low() const noexcept { return scale_ * unit_support_low(); }

double RadialLaw::unit_log_survival(double s) const {
  if (s <= unit_support_low()) return 0.0;
  switch (family_) {
    case RadialFamily::normal: return -0.5 * s * s;
    case RadialFamily::kotz: return -std::pow(s, param_);
    case RadialFamily::logis: {
      const double u = s * s;
      return std::log(2.0) - u - std::log1p(std::exp(-u));
    }
    case RadialFamily::modkotz: return -std::pow(s, 1.5) * std::log(s) - kModKotzOffset;
    case RadialFamily::lognor: return normal_log_survival(std::log(s));
    case RadialFamily::student: return -0.5 * param_ * std::log1p(s * s / param_);
  }
  return 0.0;
}

double RadialLaw::unit_density(double s) const {
  // Right limit at the support edge, which is nonzero for kotz with beta <= 1.
  if (s < unit_support_low()) return 0.0;
  switch (family_) {
    case RadialFamily::normal: return s * std::exp(-0.5 * s * s);
    case RadialFamily::kotz:
      return param_ * std::pow(s, param_ - 1.0) * std::exp(-std::pow(s, param_));
    case RadialFamily::logis: {
      const double e = std::exp(-s * s);
      return 4.0 * s * e / ((1.0 + e) * (1.0 + e));
    }
    case RadialFamily::modkotz: {
      const double hazard = std::sqrt(s) * (1.5 * std::log(s) + 1.0);
      return hazard * std::exp(unit_log_survival(s));
    }
    case RadialFamily::lognor: return s > 0.0 ? normal_pdf(std::log(s)) / s : 0.0;
    case RadialFamily::student:
      return s * std::pow(1.0 + s * s / param_, -0.5 * (param_ + 2.0));
  }
  return 0.0;
}

double RadialLaw::unit_psi(double s) const {
  switch (family_) {
    case RadialFamily::normal: return 1.0 / s;
    case RadialFamily::kotz: return std::pow(s, 1.0 - param_) / param_;
    case RadialFamily::logis: return (1.0 + std::exp(-s * s)) / (2.0 * s);
    case RadialFamily::modkotz: return 1.0 / (std::sqrt(s) * (1.5 * std::log(s) + 1.0));
    case RadialFamily::lognor: {
      // s * Mills ratio of log s, in log space so it stays finite in the tail.
      const double z = std::log(s);
      return s * std::exp(normal_log_survival(z) + 0.5 * z * z + kLogSqrt2Pi);
    }
    case RadialFamily::student: break;
  }
  throw Error(ErrorKind::unsupported_family,
              "student radial law is not in the Gumbel domain; no auxiliary function");
}

double RadialLaw::unit_survival_inverse(double s) const {
  switch (family_) {
    case RadialFamily::normal: return std::sqrt(-2.0 * std::log(s));
    case RadialFamily::kotz: return std::pow(-std::log(s), 1.0 / param_);
    case RadialFamily::logis: return std::sqrt(std::log1p(2.0 * (1.0 - s) / s));
    case RadialFamily::lognor: return std::exp(-normal_quantile(s));
    case RadialFamily::student:
      return std::sqrt(param_ * std::expm1(-2.0 / param_ * std::log(s)));
    case RadialFamily::modkotz: break;
  }
  return invert_survival_numeric(this->with_scale(1.0), s);
}

double RadialLaw::log_survival(double r) const { return unit_log_survival(r / scale_); }

double RadialLaw::survival(double r) const { return std::exp(log_survival(r)); }

double RadialLaw::density(double r) const { return unit_density(r / scale_) / scale_; }

double RadialLaw::survival_inverse(double s) const {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorKind::domain, "survival_inverse requires 0 < s < 1");
  }
  return scale_ * unit_survival_inverse(s);
}

double RadialLaw::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::domain, "quantile requires 0 < p < 1");
  }
  return survival_inverse(1.0 - p);
}

double RadialLaw::psi_threshold() const noexcept { return support_low(); }

double RadialLaw::aux_psi(double r) const {
  if (!has_aux_psi()) {
    return unit_psi(r);  // throws unsupported_family
  }
  if (!(r > psi_threshold()) || !std::isfinite(r)) {
    throw Error(ErrorKind::domain, "aux_psi evaluated at or below its validity threshold");
  }
  return scale_ * unit_psi(r / scale_);
}

double RadialLaw::second_moment_numeric() const {
  auto integrand = [this](double r) { return 2.0 * r * survival(r); };
  QuadratureSettings q;
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-14;
  const double lo = support_low();
  double total = lo * lo;
  // Integrate in expanding blocks until the tail contribution is negligible.
  double a = lo;
  double width = scale_;
  for (int i = 0; i < 200; ++i) {
    const double piece = integrate(integrand, a, a + width, q).value;
    total += piece;
    if (piece < 1e-15 * total) break;
    a += width;
    width *= 1.5;
    if (family_ == RadialFamily::student) {
      // Polynomial tail: add the exact remainder once far out.
      if (survival(a) < 1e-12) {
        const double nu = param_;
        const double t = a / scale_;
        // integral_t^inf 2 s (1+s^2/nu)^(-nu/2) ds = 2 nu/(nu-2) (1+t^2/nu)^(1-nu/2)
        total += scale_ * scale_ * 2.0 * nu / (nu - 2.0) * std::pow(1.0 + t * t / nu, 1.0 - 0.5 * nu);
        break;
      }
    }
  }
  return total;
}

std::vector<double> RadialLaw::sample(std::uint64_t seed, std::size_t n) const {
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = survival_inverse(rng.uniform_at(i));
  return out;
}

double invert_survival_numeric(const RadialLaw& law, double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorKind::domain, "survival inversion requires 0 < s < 1");
  }
  const double target = std::log(s);
  // Nondecreasing in r: target - log S(r).
  auto f = [&](double r) { return target - law.log_survival(r); };
  const double lo = law.support_low();
  const Bracket b = expand_upward(f, lo, lo + law.scale(), 200);
  // |log S - log s| <= 1e-13 gives |S - s| <= 1e-13 s.
  return solve_increasing(f, b, 1e-13, 1e-15 * std::max(1.0, b.upper), 200);
}

}  // namespace elliptail
