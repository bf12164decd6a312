// Serial reference vs OpenMP response-diagram kernel.

#include <benchmark/benchmark.h>

#include <vector>

#include "shakebot/rocking.hpp"

namespace {

using shakebot::rocking::DiagramOptions;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

DiagramOptions options() {
  DiagramOptions o;
  o.dt = 5e-4;
  o.settle_time = 1.0;
  o.refine_boundary = false;
  return o;
}

void BM_DiagramSerial(benchmark::State& state) {
  const auto spec = shakebot::rocking::block_from_box(0.03, 0.15, 0.1);
  const auto pga = linspace(1.0, 6.0, static_cast<int>(state.range(0)));
  const auto kappa = linspace(0.03, 0.15, static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(shakebot::rocking::response_diagram_serial(spec, pga, kappa, options()));
}

void BM_DiagramParallel(benchmark::State& state) {
  const auto spec = shakebot::rocking::block_from_box(0.03, 0.15, 0.1);
  const auto pga = linspace(1.0, 6.0, static_cast<int>(state.range(0)));
  const auto kappa = linspace(0.03, 0.15, static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(shakebot::rocking::response_diagram(spec, pga, kappa, options()));
}

}  // namespace

BENCHMARK(BM_DiagramSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiagramParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
