#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "elliptail/config.hpp"
#include "elliptail/csv.hpp"
#include "elliptail/diagnostics.hpp"
#include "elliptail/errors.hpp"
#include "elliptail/estimators.hpp"
#include "elliptail/model.hpp"
#include "elliptail/oracle.hpp"
#include "elliptail/sim.hpp"

namespace et = elliptail;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string num(double v) { return std::isfinite(v) ? et::format_double(v) : "NA"; }

// Usage errors raised after CLI11 parsing (e.g. mutually dependent flags).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulateArgs {
  std::string config;
  std::string out;
  unsigned jobs = 1;
};

struct EstimateArgs {
  std::string data;
  double k_frac = et::kDefaultKFraction;
  double x = 0.0;
  std::optional<double> y;
  std::optional<double> theta;
  std::vector<std::string> methods{"m1", "m2", "m3"};
};

struct FitTailArgs {
  std::string data;
  double k_frac = et::kDefaultKFraction;
};

struct OracleArgs {
  std::string model;
  std::optional<double> x;
  std::optional<double> p;
  std::optional<double> y;
  std::optional<double> theta;
  bool trace = false;
};

struct DiagnoseArgs {
  std::string data;
  std::string col = "x";
  std::size_t n_mc = 999;
  double tail_frac = et::kDefaultTailFraction;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string format = "jsonl";
};

int run_simulate(const SimulateArgs& a) {
  const auto config = et::SimConfig::from_config(et::KeyValueConfig::load(a.config));
  const auto result = et::run_study(config, a.jobs);
  et::write_study_outputs(result, a.out);
  std::cerr << "wrote " << result.rows.size() << " summary rows to "
            << (fs::path(a.out) / "summary.csv").string() << '\n';
  return 0;
}

int run_estimate(const EstimateArgs& a) {
  const auto fit = et::fit_all(et::read_pairs_csv(fs::path(a.data)), a.k_frac);
  et::write_csv_row(std::cout, {"method", "estimate", "flags"});
  for (const auto& name : a.methods) {
    const auto method = et::parse_method(name);
    if (a.theta && method == et::Method::m3) {
      et::write_csv_row(std::cout, {name, "NA", "unsupported"});
      continue;
    }
    const auto est = a.theta ? et::quantile_hat(fit, a.x, *a.theta, method)
                             : et::theta_hat(fit, a.x, *a.y, method);
    et::write_csv_row(std::cout,
                      {name, num(est.value), est.low_threshold ? "low_threshold" : ""});
  }
  return 0;
}

int run_fit_tail(const FitTailArgs& a) {
  const auto fit = et::fit_all(et::read_pairs_csv(fs::path(a.data)), a.k_frac);
  et::write_csv_row(std::cout, {"n", "k_n", "mu_x_hat", "mu_y_hat", "sigma_x_hat",
                                "sigma_y_hat", "rho_hat", "flipped", "beta_hat", "c_hat",
                                "x_hat_q90"});
  et::write_csv_row(std::cout,
                    {std::to_string(fit.n), std::to_string(fit.k_n), num(fit.mu_x_hat),
                     num(fit.mu_y_hat), num(fit.sigma_x_hat), num(fit.sigma_y_hat),
                     num(fit.rho_hat), fit.flipped ? "true" : "false", num(fit.beta_hat),
                     num(fit.c_hat), num(fit.x_hat_q90)});
  return 0;
}

int run_oracle(const OracleArgs& a) {
  const auto model = et::model_from_config(et::KeyValueConfig::load(a.model));
  const double x = a.x ? *a.x : et::marginal_quantile_x(model, *a.p);
  const double y = a.y ? *a.y : et::cond_quantile_exact(model, x, *a.theta);
  const auto exact = et::cond_excess_exact(model, x, y);

  std::vector<std::string> header{"x", "y", "theta_exact", "approx_first",
                                  "approx_corrected", "approx_shifted", "quad_error"};
  std::vector<std::string> row{num(x), num(y), num(exact.theta)};
  for (auto order : {et::ApproxOrder::first, et::ApproxOrder::corrected,
                     et::ApproxOrder::shifted}) {
    row.push_back(model.radial().has_aux_psi() ? num(et::approx_theta(model, x, y, order).value)
                                               : "NA");
  }
  row.push_back(num(exact.error));
  if (a.trace) {
    const auto& t = exact.trace;
    for (const char* h : {"x_hat", "y_hat", "rho", "flipped", "t0", "u0", "split",
                          "tail_x", "tail_y", "denominator"}) {
      header.emplace_back(h);
    }
    for (double v : {t.x_hat, t.y_hat, t.rho}) row.push_back(num(v));
    row.emplace_back(t.flipped ? "true" : "false");
    for (double v : {t.t0, t.u0, t.split, t.tail_x, t.tail_y, t.denominator}) {
      row.push_back(num(v));
    }
  }
  et::write_csv_row(std::cout, header);
  et::write_csv_row(std::cout, row);
  return 0;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int run_diagnose(const DiagnoseArgs& a) {
  const auto data = et::read_csv_column(a.data, a.col);
  const auto fit = et::fit_logistic(data);
  const auto ks = et::ks_test_mc(data, fit, a.n_mc, a.seed, a.jobs);
  const auto gpd = et::fit_gpd_profile(data, a.tail_frac);

  json marginal{{"report", "marginal_fit"}, {"column", a.col},
                {"family", ks.family},      {"location", jnum(ks.location)},
                {"scale", jnum(ks.scale)},  {"ks_statistic", jnum(ks.ks_statistic)},
                {"p_value", jnum(ks.p_value)}, {"n_mc", ks.n_mc},
                {"seed", a.seed}};
  json tail{{"report", "tail_shape"},
            {"column", a.col},
            {"tail_fraction", a.tail_frac},
            {"threshold", jnum(gpd.threshold)},
            {"n_excess", gpd.n_excess},
            {"xi_hat", jnum(gpd.xi_hat)},
            {"sigma_hat", jnum(gpd.sigma_hat)},
            {"xi_ci_low", jnum(gpd.xi_ci_low)},
            {"xi_ci_high", jnum(gpd.xi_ci_high)},
            {"log_likelihood", jnum(gpd.log_likelihood)},
            {"rapid_variation_ok", gpd.rapid_variation_ok},
            {"symmetry_test_run", gpd.symmetry_test_run}};

  if (a.format == "jsonl") {
    std::cout << marginal.dump() << '\n' << tail.dump() << '\n';
    return 0;
  }
  // Long format keeps both reports under one header.
  et::write_csv_row(std::cout, {"report", "field", "value"});
  for (const auto* report : {&marginal, &tail}) {
    const std::string name = (*report)["report"];
    for (const auto& [key, value] : report->items()) {
      if (key == "report") continue;
      std::string text;
      if (value.is_null()) {
        text = "NA";
      } else if (value.is_string()) {
        text = value.get<std::string>();
      } else if (value.is_number_float()) {
        text = et::format_double(value.get<double>());
      } else {
        text = value.dump();
      }
      et::write_csv_row(std::cout, {name, key, text});
    }
  }
  return 0;
}

void report_error(const char* kind, const std::string& message,
                  const et::NumericFailure* failure = nullptr) {
  json j{{"error", kind}, {"message", message}};
  if (failure) {
    j["lower"] = jnum(failure->lower());
    j["upper"] = jnum(failure->upper());
  }
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional tail probabilities and quantiles for bivariate elliptical laws",
               "elliptail"};
  app.require_subcommand(1, 1);
  app.get_formatter()->column_width(34);
  app.failure_message(CLI::FailureMessage::help);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the replicated simulation study");
  simulate->add_option("--config", sim.config, "Study configuration file (key = value)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory (created if missing)")->required();
  simulate->add_option("--jobs", sim.jobs, "Worker threads; output does not depend on it")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));

  EstimateArgs est;
  auto* estimate = app.add_subcommand(
      "estimate", "Estimate P(Y <= y | X > x) or the conditional quantile from a sample");
  estimate->add_option("--data", est.data, "CSV with header x,y")
      ->required()
      ->check(CLI::ExistingFile);
  estimate
      ->add_option("--k-frac", est.k_frac,
                   "Fraction of the sample used in the Weibull tail fit")
      ->capture_default_str()
      ->check(CLI::Range(1e-6, 1.0));
  estimate->add_option("--x", est.x, "Conditioning level on the X scale")->required();
  auto* est_y = estimate->add_option("--y", est.y, "Estimate theta at this y");
  auto* est_theta = estimate->add_option("--theta", est.theta,
                                         "Estimate the conditional quantile at this level")
                        ->check(CLI::Range(0.0, 1.0));
  est_y->excludes(est_theta);
  estimate->add_option("--methods", est.methods, "Comma-separated subset of m1,m2,m3")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"m1", "m2", "m3"}));

  FitTailArgs ft;
  auto* fit_tail = app.add_subcommand("fit-tail", "Print the fitted standardization and tail");
  fit_tail->add_option("--data", ft.data, "CSV with header x,y")
      ->required()
      ->check(CLI::ExistingFile);
  fit_tail
      ->add_option("--k-frac", ft.k_frac,
                   "Fraction of the sample used in the Weibull tail fit")
      ->capture_default_str()
      ->check(CLI::Range(1e-6, 1.0));

  OracleArgs orc;
  auto* oracle = app.add_subcommand(
      "oracle", "Exact conditional excess probability and its Gaussian approximations");
  oracle->add_option("--model", orc.model, "Model file (radial, beta/nu, rho, mu_*, sigma_*)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* orc_x = oracle->add_option("--x", orc.x, "Conditioning level on the X scale");
  auto* orc_p = oracle->add_option("--p", orc.p, "Use x with P(X > x) = p instead of --x")
                    ->check(CLI::Range(0.0, 1.0));
  orc_x->excludes(orc_p);
  auto* orc_y = oracle->add_option("--y", orc.y, "Evaluate theta at this y");
  auto* orc_theta = oracle->add_option("--theta", orc.theta, "Solve for y at this level")
                        ->check(CLI::Range(0.0, 1.0));
  orc_y->excludes(orc_theta);
  oracle->add_flag("--trace", orc.trace, "Append the quadrature intermediates to the row");

  DiagnoseArgs dg;
  auto* diagnose = app.add_subcommand(
      "diagnose", "Logistic marginal fit with Monte Carlo KS test, and GPD tail-shape test");
  diagnose->add_option("--data", dg.data, "CSV file with a header line")
      ->required()
      ->check(CLI::ExistingFile);
  diagnose->add_option("--col", dg.col, "Column to analyse")->capture_default_str();
  diagnose->add_option("--n-mc", dg.n_mc, "Monte Carlo replicates for the KS p-value")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{99}, std::size_t{10000000}));
  diagnose
      ->add_option("--tail-frac", dg.tail_frac,
                   "Fraction of largest values used in the GPD fit")
      ->capture_default_str()
      ->check(CLI::Range(1e-6, 0.5));
  diagnose->add_option("--seed", dg.seed, "Seed for the Monte Carlo replicates")->required();
  diagnose->add_option("--jobs", dg.jobs, "Worker threads; output does not depend on it")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
  diagnose->add_option("--format", dg.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"jsonl", "csv"}));

  try {
    app.parse(argc, argv);
    if (estimate->parsed() && !est.y && !est.theta) {
      throw UsageError("estimate: one of --y or --theta is required");
    }
    if (oracle->parsed() && !orc.x && !orc.p) {
      throw UsageError("oracle: one of --x or --p is required");
    }
    if (oracle->parsed() && !orc.y && !orc.theta) {
      throw UsageError("oracle: one of --y or --theta is required");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n" << app.help() << '\n';
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (estimate->parsed()) return run_estimate(est);
    if (fit_tail->parsed()) return run_fit_tail(ft);
    if (oracle->parsed()) return run_oracle(orc);
    if (diagnose->parsed()) return run_diagnose(dg);
  } catch (const et::NumericFailure& e) {
    report_error(et::to_string(e.kind()), e.what(), &e);
    return 1;
  } catch (const et::Error& e) {
    report_error(et::to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 2;
}
