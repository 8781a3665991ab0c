#include <benchmark/benchmark.h>

#include "edpm/blocked_gibbs.hpp"
#include "edpm/inference.hpp"
#include "edpm/polya_urn.hpp"
#include "edpm/simstudy.hpp"

using namespace edpm;

namespace {

Dataset toy(std::size_t p) {
  DgpConfig cfg;
  cfg.p = p;
  Rng rng = make_stream(1);
  return simulate_dataset(cfg, rng);
}

void BM_AssignmentSweep(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const int M = static_cast<int>(state.range(1));
  const Dataset data = toy(p);
  const BaseMeasure base(default_hyperparameters(data));
  Rng rng = make_stream(2);
  GibbsState s = initial_state(data, base, Truncation(10, M), InitPolicy::prior_draw, rng);
  for (auto _ : state) {
    update_assignments(s, data, rng);
    benchmark::DoNotOptimize(s.K.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.n()));
}
BENCHMARK(BM_AssignmentSweep)->Args({5, 10})->Args({5, 50})->Args({15, 50});

void BM_BlockedSweep(benchmark::State& state) {
  const Dataset data = toy(static_cast<std::size_t>(state.range(0)));
  const BaseMeasure base(default_hyperparameters(data));
  Rng rng = make_stream(3);
  GibbsState s = initial_state(data, base, Truncation(10, 50), InitPolicy::prior_draw, rng);
  for (auto _ : state) sweep(s, data, base, rng);
}
BENCHMARK(BM_BlockedSweep)->Arg(5)->Arg(15);

void BM_UrnSweep(benchmark::State& state) {
  const Dataset data = toy(static_cast<std::size_t>(state.range(0)));
  const BaseMeasure base(default_hyperparameters(data));
  Rng rng = make_stream(4);
  UrnConfig cfg;
  UrnState s = initial_urn_state(data, base, cfg, rng);
  for (int t = 0; t < 50; ++t) pu_sweep(s, data, base, rng);
  for (auto _ : state) pu_sweep(s, data, base, rng);
}
BENCHMARK(BM_UrnSweep)->Arg(5)->Arg(15);

void BM_ConditionalMeans(benchmark::State& state) {
  const Dataset data = toy(static_cast<std::size_t>(state.range(0)));
  const BaseMeasure base(default_hyperparameters(data));
  Rng rng = make_stream(5);
  const GibbsState s = initial_state(data, base, Truncation(10, 50), InitPolicy::prior_draw, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conditional_means(s, data.X));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.n()));
}
BENCHMARK(BM_ConditionalMeans)->Arg(5)->Arg(15);

}  // namespace
