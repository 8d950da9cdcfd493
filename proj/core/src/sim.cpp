#include "elliptail/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "elliptail/csv.hpp"
#include "elliptail/errors.hpp"
#include "elliptail/oracle.hpp"
#include "elliptail/rng.hpp"

namespace elliptail {

namespace {

constexpr double kMaxFailFraction = 0.20;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& name : names) out.push_back(parse_method(name));
  return out;
}

bool is_probability(double p) { return p > 0.0 && p < 1.0; }

std::string cell_key(double rho, double p) {
  return "rho" + format_double(rho) + "_p" + format_double(p);
}

std::vector<double> finite_only(const std::vector<double>& v) {
  std::vector<double> out;
  for (double e : v) {
    if (!std::isnan(e)) out.push_back(e);
  }
  return out;
}

// Fits (or injects) the tail model for one replicate and fills its slot in
// every RawErrors block of this rho.
void run_replicate(const SimConfig& config, const RadialLaw& law, std::size_t rho_index,
                   std::size_t replicate, const std::vector<SimTargets>& targets,
                   std::vector<RawErrors>& raw) {
  const double rho = config.rho_list[rho_index];
  const EllipticalModel model = EllipticalModel::standard(rho, law);
  TailFit fit;
  try {
    if (config.inject_true_parameters) {
      const WeibullTail tail = true_weibull_tail(law);
      fit.rho_hat = rho;
      fit.beta_hat = tail.beta;
      fit.c_hat = tail.c;
      fit.n = config.n;
      fit.x_hat_q90 = -std::numeric_limits<double>::infinity();
    } else {
      const PairedSample sample =
          sample_pairs(model, derive_seed(config.seed, replicate), config.n);
      fit = fit_all(sample, config.k_fraction);
    }
  } catch (const Error&) {
    return;  // every key of this replicate stays NaN
  }

  for (RawErrors& block : raw) {
    if (block.rho != rho) continue;
    const SimTargets* cell = nullptr;
    for (const SimTargets& t : targets) {
      if (t.rho == rho && t.p == block.p) cell = &t;
    }
    for (std::size_t t = 0; t < config.theta_grid.size(); ++t) {
      const double theta = config.theta_grid[t];
      try {
        if (block.kind == ErrorTarget::prob) {
          block.errors[t][replicate] =
              theta_hat(fit, cell->x, cell->y[t], block.method, config.quadrature).value - theta;
        } else {
          block.errors[t][replicate] =
              quantile_hat(fit, cell->x, theta, block.method).value - cell->y[t];
        }
      } catch (const Error&) {
        block.errors[t][replicate] = kNaN;
      }
    }
  }
}

}  // namespace

std::string_view to_string(ErrorTarget k) noexcept {
  return k == ErrorTarget::prob ? "prob" : "quantile";
}

RadialLaw SimConfig::radial_law() const { return RadialLaw::by_name(family, family_param); }

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); };
  radial_law();
  if (rho_list.empty()) fail("rho_list must not be empty");
  for (double r : rho_list) {
    if (!(std::abs(r) < 1.0)) fail("rho values must satisfy |rho| < 1");
  }
  if (n < 20) fail("n must be at least 20");
  if (replicates < 1) fail("replicates must be at least 1");
  if (p_levels.empty() || theta_grid.empty()) fail("p_levels and theta_grid must not be empty");
  for (double p : p_levels) {
    if (!is_probability(p)) fail("p_levels must lie in (0, 1)");
  }
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    if (!is_probability(theta_grid[i])) fail("theta_grid must lie in (0, 1)");
    if (i > 0 && !(theta_grid[i] > theta_grid[i - 1])) fail("theta_grid must be strictly increasing");
  }
  if (!(k_fraction > 0.0 && k_fraction < 1.0)) fail("k_fraction must lie in (0, 1)");
  if (methods.empty() && quantile_methods.empty()) fail("no methods selected");
  for (Method m : quantile_methods) {
    if (m == Method::m3) fail("quantile_methods may contain only m1 and m2");
  }
  if (inject_true_parameters) true_weibull_tail(radial_law());
  quadrature.validate();
}

SimConfig SimConfig::from_config(const KeyValueConfig& kv) {
  SimConfig c;
  c.family = kv.get_string("radial", c.family);
  const RadialFamily family = parse_radial_family(c.family);
  if (family == RadialFamily::kotz) c.family_param = kv.get_double("beta");
  if (family == RadialFamily::student) c.family_param = kv.get_double("nu");
  if (kv.contains("rho_list")) c.rho_list = kv.get_doubles("rho_list");
  if (kv.contains("rho") && !kv.contains("rho_list")) c.rho_list = {kv.get_double("rho")};
  const long long n = kv.get_int("n", static_cast<long long>(c.n));
  const long long reps = kv.get_int("replicates", static_cast<long long>(c.replicates));
  const long long seed = kv.get_int("seed", static_cast<long long>(c.seed));
  if (n < 0 || reps < 0 || seed < 0) {
    throw Error(ErrorKind::invalid_argument, "n, replicates and seed must be non-negative");
  }
  c.n = static_cast<std::size_t>(n);
  c.replicates = static_cast<std::size_t>(reps);
  c.seed = static_cast<std::uint64_t>(seed);
  if (kv.contains("p_levels")) c.p_levels = kv.get_doubles("p_levels");
  if (kv.contains("theta_grid")) c.theta_grid = kv.get_doubles("theta_grid");
  c.k_fraction = kv.get_double("k_fraction", c.k_fraction);
  if (kv.contains("methods")) c.methods = parse_methods(kv.get_strings("methods"));
  if (kv.contains("quantile_methods")) {
    c.quantile_methods = parse_methods(kv.get_strings("quantile_methods"));
  }
  c.inject_true_parameters = kv.get_bool("inject_true_parameters", false);
  c.validate();
  return c;
}

ErrorSummary summarize_errors(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorKind::insufficient_data, "no errors to summarize");
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = [&](double p) {
    // ceil(p n) with a guard against representation error in p * n.
    const double r = std::ceil(p * n - 1e-9);
    return sorted[static_cast<std::size_t>(std::clamp(r, 1.0, n)) - 1];
  };
  return {rank(0.025), rank(0.5), rank(0.975)};
}

WeibullTail true_weibull_tail(const RadialLaw& law) {
  const double lambda = law.scale();
  switch (law.family()) {
    case RadialFamily::normal: return {2.0, 0.5 / (lambda * lambda)};
    case RadialFamily::kotz: return {law.param(), std::pow(lambda, -law.param())};
    default: break;
  }
  throw Error(ErrorKind::unsupported_family,
              "true Weibull tail parameters exist only for normal and kotz radial laws");
}

SimResult run_study(const SimConfig& config, unsigned jobs) {
  config.validate();
  const RadialLaw law = config.radial_law();
  SimResult result;
  result.config = config;
  result.family_label = law.name();

  for (double rho : config.rho_list) {
    const EllipticalModel model = EllipticalModel::standard(rho, law);
    for (double p : config.p_levels) {
      SimTargets cell;
      cell.rho = rho;
      cell.p = p;
      cell.x = marginal_quantile_x(model, p, config.quadrature);
      for (double theta : config.theta_grid) {
        cell.y.push_back(cond_quantile_exact(model, cell.x, theta, config.quadrature));
      }
      result.targets.push_back(std::move(cell));
    }
  }

  const std::size_t n_theta = config.theta_grid.size();
  for (double rho : config.rho_list) {
    for (double p : config.p_levels) {
      for (Method m : config.methods) {
        result.raw.push_back({rho, p, m, ErrorTarget::prob,
                              std::vector<std::vector<double>>(
                                  n_theta, std::vector<double>(config.replicates, kNaN))});
      }
      for (Method m : config.quantile_methods) {
        result.raw.push_back({rho, p, m, ErrorTarget::quantile,
                              std::vector<std::vector<double>>(
                                  n_theta, std::vector<double>(config.replicates, kNaN))});
      }
    }
  }

  // Work units are (rho, replicate); each writes only its own slots.
  const std::size_t units = config.rho_list.size() * config.replicates;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t u = next++; u < units; u = next++) {
      run_replicate(config, law, u / config.replicates, u % config.replicates, result.targets,
                    result.raw);
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (const RawErrors& block : result.raw) {
    const SimTargets* cell = nullptr;
    for (const SimTargets& t : result.targets) {
      if (t.rho == block.rho && t.p == block.p) cell = &t;
    }
    for (std::size_t t = 0; t < n_theta; ++t) {
      const std::vector<double> ok = finite_only(block.errors[t]);
      const std::size_t n_fail = config.replicates - ok.size();
      if (static_cast<double>(n_fail) > kMaxFailFraction * static_cast<double>(config.replicates)) {
        throw Error(ErrorKind::numeric_failure,
                    "more than 20% of replicates failed for rho=" + format_double(block.rho) +
                        " p=" + format_double(block.p) + " method=" +
                        std::string(to_string(block.method)) + " kind=" +
                        std::string(to_string(block.kind)));
      }
      SummaryRow row;
      row.family = result.family_label;
      row.rho = block.rho;
      row.p = block.p;
      row.theta = config.theta_grid[t];
      row.method = block.method;
      row.kind = block.kind;
      row.target = block.kind == ErrorTarget::prob ? row.theta : cell->y[t];
      row.errors = summarize_errors(ok);
      row.n_fail = n_fail;
      result.rows.push_back(row);
    }
  }
  return result;
}

void write_summary_csv(std::ostream& out, const SimResult& result) {
  write_csv_row(out, {"family", "rho", "p", "theta", "method", "kind", "q025", "median", "q975",
                      "n_fail"});
  for (const SummaryRow& r : result.rows) {
    write_csv_row(out, {r.family, format_double(r.rho), format_double(r.p), format_double(r.theta),
                        std::string(to_string(r.method)), std::string(to_string(r.kind)),
                        format_double(r.errors.q025), format_double(r.errors.median),
                        format_double(r.errors.q975), std::to_string(r.n_fail)});
  }
}

void write_study_outputs(const SimResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open("summary.csv");
    write_summary_csv(out, result);
  }

  const auto& cfg = result.config;
  for (const RawErrors& block : result.raw) {
    auto out = open("errors_" + cell_key(block.rho, block.p) + "_" +
                    std::string(to_string(block.method)) + "_" +
                    std::string(to_string(block.kind)) + ".csv");
    write_csv_row(out, {"replicate", "theta", "error"});
    for (std::size_t t = 0; t < block.errors.size(); ++t) {
      for (std::size_t r = 0; r < block.errors[t].size(); ++r) {
        const double e = block.errors[t][r];
        write_csv_row(out, {std::to_string(r), format_double(cfg.theta_grid[t]),
                            std::isnan(e) ? "NA" : format_double(e)});
      }
    }
  }

  // Plot data: error quantiles against theta, and estimated conditional
  // quantiles against the exact curve.
  for (const SimTargets& cell : result.targets) {
    for (ErrorTarget kind : {ErrorTarget::prob, ErrorTarget::quantile}) {
      std::vector<const RawErrors*> blocks;
      for (const RawErrors& b : result.raw) {
        if (b.rho == cell.rho && b.p == cell.p && b.kind == kind) blocks.push_back(&b);
      }
      if (blocks.empty()) continue;
      auto out = open("curves_" + cell_key(cell.rho, cell.p) + "_" + std::string(to_string(kind)) +
                      ".dat");
      out << "# family " << result.family_label << " rho " << format_double(cell.rho) << " p "
          << format_double(cell.p) << " x " << format_double(cell.x) << '\n';
      out << (kind == ErrorTarget::prob ? "# theta" : "# theta y_exact");
      for (const RawErrors* b : blocks) {
        const std::string m(to_string(b->method));
        out << ' ' << m << "_q025 " << m << "_median " << m << "_q975";
      }
      out << '\n';
      for (std::size_t t = 0; t < cfg.theta_grid.size(); ++t) {
        out << format_double(cfg.theta_grid[t]);
        if (kind == ErrorTarget::quantile) out << ' ' << format_double(cell.y[t]);
        for (const RawErrors* b : blocks) {
          std::vector<double> values = finite_only(b->errors[t]);
          if (kind == ErrorTarget::quantile) {
            for (double& v : values) v += cell.y[t];
          }
          const ErrorSummary s = summarize_errors(values);
          out << ' ' << format_double(s.q025) << ' ' << format_double(s.median) << ' '
              << format_double(s.q975);
        }
        out << '\n';
      }
    }
  }
}

}  // namespace elliptail
