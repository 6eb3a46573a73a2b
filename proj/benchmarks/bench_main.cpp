#include <benchmark/benchmark.h>

#include <sharpiv/sharpiv.hpp>

using namespace sharpiv;

static void BM_OracleMoments(benchmark::State& state) {
  const auto p = solve_dgp_params(0.3, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_moments(p.b0, p.b1));
}
BENCHMARK(BM_OracleMoments);

static void BM_SolveDgp(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_dgp_params(0.3, 0.8));
}
BENCHMARK(BM_SolveDgp);

static void BM_Simulate(benchmark::State& state) {
  const auto p = solve_dgp_params(0.3, 0.5);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_dataset({p.b0, p.b1, 0.2, n, 1}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(100000);

static void BM_Crossfit(benchmark::State& state) {
  const auto p = solve_dgp_params(0.3, 0.5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ds = simulate_dataset({p.b0, p.b1, 0.2, n, 1}).with_score_covariate();
  const auto folds = assign_folds(n, 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_crossfit(ds, folds, LogisticSpec{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Crossfit)->Arg(1000)->Arg(5000);

static void BM_Pipeline(benchmark::State& state) {
  const auto p = solve_dgp_params(0.3, 0.8);
  const auto ds = simulate_dataset({p.b0, p.b1, 0.2, 5000, 2}).with_score_covariate();
  const auto folds = assign_folds(5000, 2, 2);
  for (auto _ : state) {
    const auto nf = fit_crossfit(ds, folds, LogisticSpec{});
    const auto mu = estimate_strength(ds, nf);
    const auto hq = quantile_classifier_by_fold(nf.gamma, folds, mu.mu_hat);
    benchmark::DoNotOptimize(estimate_sharpness(ds, nf, hq, mu));
  }
}
BENCHMARK(BM_Pipeline);
BENCHMARK_MAIN();
