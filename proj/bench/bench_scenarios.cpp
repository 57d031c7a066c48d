// Compares the serial reference scenario kernels against the OpenMP path.
// Run: ./bench_scenarios  (QCTRL_THREADS caps the parallel variant)

#include <benchmark/benchmark.h>

#include "qoc/instances.hpp"
#include "qoc/stochastic_objective.hpp"
#include "qoc/uncertainty.hpp"

namespace {

using namespace qoc;

struct Workload {
  EnergyInstance inst = build_energy_instance(3, 7, 3.0, 25);
  NoiseModel noise =
      NoiseModel::from_offset((RVector(3) << 0.0, 0.05, 0.05).finished());
  ScenarioSet scenarios = sample_scenarios(noise, 64, 25, 11);
  ControlField u = constant_control(2, 25, 0.5);
};

Workload& workload() {
  static Workload w;
  return w;
}

void costs(benchmark::State& state, Execution exec) {
  auto& w = workload();
  for (auto _ : state) {
    auto out = detail::per_scenario_costs(w.inst.system, w.u, w.scenarios,
                                          w.inst.target, exec);
    benchmark::DoNotOptimize(out);
  }
}

void gradients(benchmark::State& state, Execution exec) {
  auto& w = workload();
  std::vector<double> costs_out;
  std::vector<RMatrix> grads_out;
  for (auto _ : state) {
    detail::per_scenario_costs_and_gradients(w.inst.system, w.u, w.scenarios,
                                             w.inst.target, exec, costs_out, grads_out);
    benchmark::DoNotOptimize(grads_out);
  }
}

void bench_costs_serial(benchmark::State& state) { costs(state, Execution::serial); }
void bench_costs_parallel(benchmark::State& state) { costs(state, Execution::parallel); }
void bench_gradients_serial(benchmark::State& state) { gradients(state, Execution::serial); }
void bench_gradients_parallel(benchmark::State& state) {
  gradients(state, Execution::parallel);
}

BENCHMARK(bench_costs_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_costs_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_gradients_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_gradients_parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
