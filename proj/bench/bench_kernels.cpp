// Serial reference vs OpenMP kernels: grid oracle and Monte Carlo simulator.

#include "slicenet/evaluator.hpp"
#include "slicenet/optimizer.hpp"
#include "slicenet/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace slicenet;

namespace {

const NetworkSpec kFour({1, 0.5, 2, 1}, {1, 2, 3, 4}, {2, 5, 9, 14});
const NetworkSpec kBalanced({1, 1}, {1, 2}, {1, 10});

void BM_OracleSerial(benchmark::State& state) {
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle_serial(kFour, step));
}

void BM_OracleParallel(benchmark::State& state) {
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle(kFour, step));
}

SimConfig sim_config(std::int64_t reps) {
  SimConfig c;
  c.replications = static_cast<std::size_t>(reps);
  c.seed = 7;
  return c;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto strategy = compute_optimal(kBalanced).strategy;
  const auto config = sim_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(kBalanced, strategy, config));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto strategy = compute_optimal(kBalanced).strategy;
  const auto config = sim_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(kBalanced, strategy, config));
}

void BM_Optimize(benchmark::State& state) {
  std::vector<double> b(static_cast<std::size_t>(state.range(0)), 1.0), d, g;
  for (std::size_t i = 0; i < b.size(); ++i) {
    d.push_back(1.0 + static_cast<double>(i));
    g.push_back(static_cast<double>((i * 7) % 11));
  }
  const NetworkSpec spec(b, d, g);
  for (auto _ : state) benchmark::DoNotOptimize(compute_optimal(spec));
}

}  // namespace

BENCHMARK(BM_OracleSerial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Optimize)->Arg(8)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
