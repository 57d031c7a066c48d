#include "qoc/pipeline.hpp"

#include <stdexcept>

#include "qoc/rng.hpp"

namespace qoc {

ProblemFunctions make_problem(const ControlSystem& system, const ScenarioSet& scenarios,
                              const TargetSpec& target, const RiskSpec& risk) {
  ProblemFunctions fns;
  fns.value = [=](const RMatrix& u) {
    ControlField field{u, false};
    return evaluate(system, field, scenarios, target, risk).total;
  };
  fns.gradient = [=](const RMatrix& u) {
    ControlField field{u, false};
    return gradient(system, field, scenarios, target, risk).first;
  };
  return fns;
}

ProblemFactory make_resampling_factory(const ControlSystem& system,
                                       const TargetSpec& target, const RiskSpec& risk,
                                       const NoiseModel& noise, int scenario_count,
                                       std::uint64_t seed) {
  return [=](int iteration) {
    const std::uint64_t iter_seed =
        iteration == 0 ? seed
                       : rng::derive_seed(seed, "optimizers",
                                          "resample-" + std::to_string(iteration));
    const ScenarioSet scenarios =
        sample_scenarios(noise, scenario_count, system.steps, iter_seed);
    return make_problem(system, scenarios, target, risk);
  };
}

ControlField initial_control(const ControlSystem& system, const SolverSpec& spec,
                             std::uint64_t seed) {
  const int n = system.controller_count();
  const int t = system.steps;
  if (spec.init == "uniform") {
    return constant_control(n, t, 1.0 / n);
  }
  if (spec.init == "random") {
    rng::CounterRng gen(rng::derive_seed(seed, "optimizers", "u0"), 0);
    ControlField u;
    u.values = RMatrix(n, t);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < t; ++k) u.values(j, k) = gen.uniform01();
    }
    return u;
  }
  throw std::invalid_argument("initial_control: unknown init '" + spec.init + "'");
}

ScenarioSet in_sample_scenarios(const ControlSystem& system, const NoiseModel& noise,
                                int scenario_count, std::uint64_t master_seed) {
  const std::uint64_t seed = rng::derive_seed(master_seed, "uncertainty", "in-sample");
  return sample_scenarios(noise, scenario_count, system.steps, seed);
}

SolveTrace run_relaxation(const ControlSystem& system, const TargetSpec& target,
                          const RiskSpec& risk, const NoiseModel& noise,
                          const SolverSpec& spec, std::uint64_t master_seed) {
  const ControlField u0 = initial_control(system, spec, master_seed);
  const std::uint64_t sample_seed =
      rng::derive_seed(master_seed, "uncertainty", "in-sample");

  if (spec.kind == SolverKind::adam) {
    const ProblemFactory factory = make_resampling_factory(
        system, target, risk, noise, spec.scenario_count, sample_seed);
    return solve_adam(factory, u0, spec.adam);
  }
  const ScenarioSet scenarios =
      sample_scenarios(noise, spec.scenario_count, system.steps, sample_seed);
  const ProblemFunctions problem = make_problem(system, scenarios, target, risk);
  return solve_quasi_newton(problem, u0, spec.qn);
}

}  // namespace qoc
