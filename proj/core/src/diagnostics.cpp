#include "elliptail/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "elliptail/errors.hpp"
#include "elliptail/rng.hpp"

namespace elliptail {

namespace {

// 0.95 quantile of the chi-square law with one degree of freedom.
constexpr double kChiSq95 = 3.841458820694124;
constexpr double kXiGridLow = -0.45;
constexpr double kXiGridHigh = 1.5;
constexpr double kXiGridStep = 0.005;
constexpr double kXiFloor = -0.4999;
constexpr double kCiTol = 1e-4;

double logistic_cdf_std(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct LogisticTerms {
  double loglik = 0.0;
  double grad_m = 0.0;    // d/dm, times scale
  double grad_tau = 0.0;  // d/d log(scale)
  double h_mm = 0.0;      // second derivatives in (m / scale, tau)
  double h_mt = 0.0;
  double h_tt = 0.0;
};

LogisticTerms logistic_terms(std::span<const double> data, double m, double s) {
  LogisticTerms t;
  const double n = static_cast<double>(data.size());
  double sum_g = 0.0, sum_f = 0.0, sum_zg = 0.0, sum_fz = 0.0, sum_fzz = 0.0;
  for (double x : data) {
    const double z = (x - m) / s;
    const double F = logistic_cdf_std(z);
    const double f = F * (1.0 - F);
    const double g = 1.0 - 2.0 * F;
    // log density of the standard logistic: -z - 2 log(1 + e^-z)
    const double log1pe = z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    t.loglik += -z - 2.0 * log1pe;
    sum_g += g;
    sum_f += f;
    sum_zg += z * g;
    sum_fz += f * z;
    sum_fzz += f * z * z;
  }
  t.loglik -= n * std::log(s);
  t.grad_m = -sum_g;
  t.grad_tau = -(sum_zg + n);
  t.h_mm = -2.0 * sum_f;
  t.h_mt = sum_g - 2.0 * sum_fz;
  t.h_tt = sum_zg - 2.0 * sum_fzz;
  return t;
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

// (1 + 1/xi) log(1 + xi w), continuous through xi = 0.
double gpd_term(double xi, double w) {
  const double a = xi * w;
  if (std::abs(a) < 1e-5) {
    return std::log1p(a) + w * (1.0 - a / 2.0 + a * a / 3.0 - a * a * a / 4.0);
  }
  return (1.0 + 1.0 / xi) * std::log1p(a);
}

}  // namespace

double logistic_cdf(double x, double location, double scale) noexcept {
  return logistic_cdf_std((x - location) / scale);
}

LogisticFit fit_logistic(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 10) throw Error(ErrorKind::insufficient_data, "logistic fit requires n >= 10");
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : data) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorKind::insufficient_data, "logistic fit needs non-constant data");

  double m = median_of(std::vector<double>(data.begin(), data.end()));
  double tau = std::log(sd * std::sqrt(3.0) / 3.14159265358979323846);
  const double nd = static_cast<double>(n);
  for (int it = 0; it < 100; ++it) {
    const double s = std::exp(tau);
    const LogisticTerms t = logistic_terms(data, m, s);
    const double gnorm = std::hypot(t.grad_m, t.grad_tau) / nd;
    if (gnorm < 1e-10) return {m, s, it};
    // Newton direction in (m / s, tau); fall back to gradient ascent when
    // the Hessian is not negative definite.
    const double det = t.h_mm * t.h_tt - t.h_mt * t.h_mt;
    double dm = 0.0, dt = 0.0;
    if (t.h_mm < 0.0 && det > 0.0) {
      dm = -(t.h_tt * t.grad_m - t.h_mt * t.grad_tau) / det;
      dt = -(-t.h_mt * t.grad_m + t.h_mm * t.grad_tau) / det;
    } else {
      dm = t.grad_m / nd;
      dt = t.grad_tau / nd;
    }
    double step = 1.0;
    for (int half = 0; half < 60; ++half) {
      const double m_new = m + step * dm * s;
      const double tau_new = tau + step * dt;
      if (logistic_terms(data, m_new, std::exp(tau_new)).loglik >= t.loglik - 1e-12 * std::abs(t.loglik)) {
        m = m_new;
        tau = tau_new;
        break;
      }
      step *= 0.5;
    }
  }
  throw NumericFailure("logistic fit did not converge in 100 iterations", m, std::exp(tau));
}

double ks_statistic(std::span<const double> data, const LogisticFit& fit) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = logistic_cdf(sorted[i], fit.location, fit.scale);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

MarginalFitReport ks_test_mc(std::span<const double> data, const LogisticFit& fit,
                             std::size_t n_mc, std::uint64_t seed, unsigned jobs) {
  if (n_mc < 99) throw Error(ErrorKind::invalid_argument, "ks_test_mc requires n_mc >= 99");
  MarginalFitReport report;
  report.location = fit.location;
  report.scale = fit.scale;
  report.n_mc = n_mc;
  report.ks_statistic = ks_statistic(data, fit);

  const std::size_t n = data.size();
  std::vector<double> stats(n_mc);
  auto replicate = [&](std::size_t j) {
    const CounterRng rng(derive_seed(seed, j));
    std::vector<double> draw(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform_at(i);
      draw[i] = fit.location + fit.scale * std::log(u / (1.0 - u));
    }
    stats[j] = ks_statistic(draw, fit_logistic(draw));
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    for (std::size_t j = 0; j < n_mc; ++j) replicate(j);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    {
      std::vector<std::jthread> workers;
      for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
          try {
            for (std::size_t j = w; j < n_mc; j += jobs) replicate(j);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  const auto exceed = std::count_if(stats.begin(), stats.end(),
                                    [&](double d) { return d >= report.ks_statistic; });
  report.p_value = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(n_mc) + 1.0);
  return report;
}

double gpd_log_likelihood(std::span<const double> excesses, double xi, double sigma) {
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  double ll = -static_cast<double>(excesses.size()) * std::log(sigma);
  for (double y : excesses) {
    const double w = y / sigma;
    if (!(1.0 + xi * w > 0.0)) return -std::numeric_limits<double>::infinity();
    ll -= gpd_term(xi, w);
  }
  return ll;
}

double gpd_profile_log_likelihood(std::span<const double> excesses, double xi, double* sigma_out) {
  const double y_max = *std::max_element(excesses.begin(), excesses.end());
  const double y_mean = std::accumulate(excesses.begin(), excesses.end(), 0.0) /
                        static_cast<double>(excesses.size());
  double lo = std::log(y_mean) - 15.0;
  const double hi = std::log(y_mean) + 8.0;
  if (xi < 0.0) lo = std::max(lo, std::log(-xi * y_max) + 1e-12);
  auto neg = [&](double log_sigma) {
    const double ll = gpd_log_likelihood(excesses, xi, std::exp(log_sigma));
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
  };
  const auto [arg, value] = boost::math::tools::brent_find_minima(neg, lo, hi, 52);
  if (sigma_out) *sigma_out = std::exp(arg);
  return -value;
}

TailShapeReport fit_gpd_profile(std::span<const double> data, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 0.5)) {
    throw Error(ErrorKind::invalid_argument, "tail_fraction must lie in (0, 0.5]");
  }
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto k = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(n)));
  if (k < 10 || k >= n) {
    throw Error(ErrorKind::insufficient_data, "GPD fit needs at least 10 excesses");
  }
  TailShapeReport report;
  report.threshold = sorted[n - k - 1];
  std::vector<double> excesses;
  for (std::size_t i = n - k; i < n; ++i) {
    if (sorted[i] > report.threshold) excesses.push_back(sorted[i] - report.threshold);
  }
  report.n_excess = excesses.size();
  if (report.n_excess < 10) {
    throw Error(ErrorKind::insufficient_data, "GPD fit needs at least 10 excesses");
  }

  auto profile = [&](double xi) { return gpd_profile_log_likelihood(excesses, xi); };

  const int steps = static_cast<int>(std::lround((kXiGridHigh - kXiGridLow) / kXiGridStep));
  std::vector<double> grid(steps + 1);
  std::vector<double> values(steps + 1);
  std::size_t best = 0;
  for (int i = 0; i <= steps; ++i) {
    grid[i] = kXiGridLow + kXiGridStep * i;
    values[i] = profile(grid[i]);
    if (values[i] > values[best]) best = static_cast<std::size_t>(i);
  }
  const double refine_lo = best == 0 ? kXiFloor : grid[best - 1];
  const double refine_hi = best == grid.size() - 1 ? grid[best] : grid[best + 1];
  const auto [xi_hat, neg_max] = boost::math::tools::brent_find_minima(
      [&](double xi) { return -profile(xi); }, refine_lo, refine_hi, 40);
  report.xi_hat = xi_hat;
  report.log_likelihood = -neg_max;
  profile(xi_hat);
  gpd_profile_log_likelihood(excesses, xi_hat, &report.sigma_hat);

  const double cut = report.log_likelihood - 0.5 * kChiSq95;
  auto inside = [&](double xi) { return profile(xi) >= cut; };
  // Walk outward along the grid from xi_hat, then bisect the crossing.
  auto endpoint = [&](int direction) {
    double in = xi_hat;
    for (double xi = xi_hat + direction * kXiGridStep;; xi += direction * kXiGridStep) {
      const double bound = direction < 0 ? std::max(kXiGridLow, kXiFloor) : kXiGridHigh;
      if ((direction < 0 && xi <= bound) || (direction > 0 && xi >= bound)) {
        if (inside(bound)) return bound;
        xi = bound;
      }
      if (!inside(xi)) {
        double out = xi;
        while (std::abs(out - in) > kCiTol) {
          const double mid = 0.5 * (in + out);
          (inside(mid) ? in : out) = mid;
        }
        return in;
      }
      in = xi;
    }
  };
  report.xi_ci_low = std::min(endpoint(-1), report.xi_hat);
  report.xi_ci_high = std::max(endpoint(+1), report.xi_hat);
  report.rapid_variation_ok = report.xi_ci_low <= 0.0 && 0.0 <= report.xi_ci_high;
  return report;
}

}  // namespace elliptail
