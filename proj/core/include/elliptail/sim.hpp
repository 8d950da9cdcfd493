#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "elliptail/config.hpp"
#include "elliptail/estimators.hpp"
#include "elliptail/model.hpp"
#include "elliptail/quadrature.hpp"

namespace elliptail {

enum class ErrorTarget { prob, quantile };

std::string_view to_string(ErrorTarget k) noexcept;

struct SimConfig {
  std::string family = "normal";
  double family_param = 0.0;  // beta for kotz, nu for student
  std::vector<double> rho_list{0.5, 0.9};
  std::size_t n = 500;
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  std::vector<double> p_levels{1e-3, 1e-4, 1e-5};
  std::vector<double> theta_grid{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  double k_fraction = kDefaultKFraction;
  std::vector<Method> methods{Method::m1, Method::m2, Method::m3};
  std::vector<Method> quantile_methods{Method::m1, Method::m2};
  /// Skip fitting and use the true Weibull tail parameters (normal and kotz
  /// only). Used to isolate the approximation error from estimation error.
  bool inject_true_parameters = false;
  QuadratureSettings quadrature{};

  RadialLaw radial_law() const;
  /// Throws Error(invalid_argument) on an inconsistent configuration.
  void validate() const;

  /// Keys: radial, beta / nu, rho_list, n, replicates, seed, p_levels,
  /// theta_grid, k_fraction, methods, quantile_methods,
  /// inject_true_parameters. Missing keys keep the defaults above.
  static SimConfig from_config(const KeyValueConfig& config);
};

struct ErrorSummary {
  double q025 = 0.0;
  double median = 0.0;
  double q975 = 0.0;
};

/// Nearest-rank 2.5%, 50% and 97.5% percentiles: the ceil(p n)-th smallest
/// value. Throws Error(insufficient_data) for an empty input.
ErrorSummary summarize_errors(std::span<const double> errors);

struct SummaryRow {
  std::string family;
  double rho = 0.0;
  double p = 0.0;
  double theta = 0.0;
  Method method = Method::m1;
  ErrorTarget kind = ErrorTarget::prob;
  double target = 0.0;  // theta for prob rows, the exact y for quantile rows
  ErrorSummary errors;
  std::size_t n_fail = 0;
};

/// Per-replicate errors for one (rho, p, method, kind); errors[t][r] is the
/// error at theta_grid[t] in replicate r, NaN when the replicate failed.
struct RawErrors {
  double rho = 0.0;
  double p = 0.0;
  Method method = Method::m1;
  ErrorTarget kind = ErrorTarget::prob;
  std::vector<std::vector<double>> errors;
};

/// Exact quantities shared by all replicates of one (rho, p) cell.
struct SimTargets {
  double rho = 0.0;
  double p = 0.0;
  double x = 0.0;
  std::vector<double> y;  // y[t] solves theta(x, y) = theta_grid[t]
};

struct SimResult {
  SimConfig config;
  std::string family_label;
  std::vector<SimTargets> targets;
  std::vector<SummaryRow> rows;
  std::vector<RawErrors> raw;
};

/// Runs the simulation study. Replicate r samples with derive_seed(seed, r);
/// per-replicate failures are recorded as NaN and excluded, and the run
/// throws Error(numeric_failure) when more than 20% of the replicates fail
/// for any key. Output is identical for every `jobs` value.
SimResult run_study(const SimConfig& config, unsigned jobs = 1);

/// Header: family,rho,p,theta,method,kind,q025,median,q975,n_fail.
void write_summary_csv(std::ostream& out, const SimResult& result);

/// Writes summary.csv, errors_<key>.csv per (rho, p, method, kind) and
/// gnuplot-ready curves_<key>.dat files into `dir` (created if missing).
void write_study_outputs(const SimResult& result, const std::filesystem::path& dir);

/// The true Weibull tail parameters (beta, c) of a standardized normal or
/// kotz radial law. Throws Error(unsupported_family) otherwise.
WeibullTail true_weibull_tail(const RadialLaw& law);

}  // namespace elliptail
