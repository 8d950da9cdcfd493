#include <benchmark/benchmark.h>

#include "elliptail/estimators.hpp"
#include "elliptail/model.hpp"
#include "elliptail/oracle.hpp"

using namespace elliptail;

namespace {

const RadialLaw& law_for(int id) {
  static const RadialLaw laws[] = {RadialLaw::normal(), RadialLaw::kotz(1.0), RadialLaw::logis(),
                                   RadialLaw::student(3.0)};
  return laws[id];
}

void BM_CondExcessExact(benchmark::State& state) {
  const auto m = EllipticalModel::standard(0.9, law_for(static_cast<int>(state.range(0))));
  const double x = marginal_quantile_x(m, 1e-5);
  const double y = 0.9 * x;
  for (auto _ : state) benchmark::DoNotOptimize(cond_excess_exact(m, x, y).theta);
  state.SetLabel(std::string(m.radial().name()));
}
BENCHMARK(BM_CondExcessExact)->DenseRange(0, 3);

void BM_CondQuantileExact(benchmark::State& state) {
  const auto m = EllipticalModel::standard(0.9, RadialLaw::normal());
  const double x = marginal_quantile_x(m, 1e-5);
  for (auto _ : state) benchmark::DoNotOptimize(cond_quantile_exact(m, x, 0.3));
}
BENCHMARK(BM_CondQuantileExact);

PairedSample bench_sample(std::size_t n) {
  return sample_pairs(EllipticalModel::standard(0.6, RadialLaw::kotz(1.0)), 12345, n);
}

void BM_KendallNaive(benchmark::State& state) {
  const auto s = bench_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau_naive(s.pairs()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallNaive)->RangeMultiplier(4)->Range(128, 8192)->Complexity(benchmark::oNSquared);

void BM_KendallMerge(benchmark::State& state) {
  const auto s = bench_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau_merge(s.pairs()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallMerge)->RangeMultiplier(4)->Range(128, 131072)->Complexity(benchmark::oNLogN);

void BM_FitAll(benchmark::State& state) {
  const auto s = bench_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_all(s).beta_hat);
}
BENCHMARK(BM_FitAll)->Arg(500)->Arg(5000);

void BM_ThetaHatM3(benchmark::State& state) {
  const auto fit = fit_all(bench_sample(500));
  const double x = fit.mu_x_hat + 4.0 * fit.sigma_x_hat;
  const double y = fit.mu_y_hat + 2.0 * fit.sigma_y_hat;
  for (auto _ : state) benchmark::DoNotOptimize(theta_hat(fit, x, y, Method::m3).value);
}
BENCHMARK(BM_ThetaHatM3);

void BM_SamplePairs(benchmark::State& state) {
  const auto m = EllipticalModel::standard(0.6, law_for(static_cast<int>(state.range(0))));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_pairs(m, ++seed, 10000).size());
  state.SetItemsProcessed(state.iterations() * 10000);
  state.SetLabel(std::string(m.radial().name()));
}
BENCHMARK(BM_SamplePairs)->DenseRange(0, 3);

}  // namespace

BENCHMARK_MAIN();
