#include "ztl/finite_beta.hpp"
#include "ztl/oracle.hpp"
#include "ztl/renorm.hpp"
#include "ztl/spec_io.hpp"

#include <benchmark/benchmark.h>

using namespace ztl;

namespace {

System example(int k) {
  return build_system(load_spec(std::string(ZTL_DATA_DIR) + "/examples/example" + std::to_string(k) + ".json"));
}

void sweep(benchmark::State& state, Execution exec) {
  System s = example(3);
  auto lim = zero_temperature_limit(s.graph, s.phi, s.psi);
  std::vector<double> betas;
  for (int i = 0; i < state.range(0); ++i) betas.push_back(0.25 * i);
  for (auto _ : state) {
    auto t = beta_sweep(s.graph, s.phi, s.psi, betas, s.graph.names(), lim, exec);
    benchmark::DoNotOptimize(t.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void oracle(benchmark::State& state, Execution exec) {
  for (auto _ : state) {
    auto trials = oracle_trials(7, static_cast<int>(state.range(0)), {}, exec);
    benchmark::DoNotOptimize(trials.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepSerial(benchmark::State& state) { sweep(state, Execution::serial); }
void BM_SweepParallel(benchmark::State& state) { sweep(state, Execution::parallel); }
void BM_OracleSerial(benchmark::State& state) { oracle(state, Execution::serial); }
void BM_OracleParallel(benchmark::State& state) { oracle(state, Execution::parallel); }

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OracleSerial)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OracleParallel)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
