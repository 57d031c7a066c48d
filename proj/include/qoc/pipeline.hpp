#pragma once

#include <cstdint>
#include <string>

#include "qoc/instances.hpp"
#include "qoc/optimizers.hpp"
#include "qoc/rounding.hpp"
#include "qoc/stochastic_objective.hpp"
#include "qoc/uncertainty.hpp"

namespace qoc {

/// Objective/gradient closures of F_R over one fixed scenario set.
ProblemFunctions make_problem(const ControlSystem& system, const ScenarioSet& scenarios,
                              const TargetSpec& target, const RiskSpec& risk);

/// Factory drawing a fresh scenario set per iteration (stream derived from
/// seed and the iteration index); iteration 0 reuses the seed's base set so
/// fixed-sample solvers see a deterministic problem.
ProblemFactory make_resampling_factory(const ControlSystem& system,
                                       const TargetSpec& target, const RiskSpec& risk,
                                       const NoiseModel& noise, int scenario_count,
                                       std::uint64_t seed);

enum class SolverKind { adam, quasi_newton };

struct SolverSpec {
  SolverKind kind = SolverKind::quasi_newton;
  int scenario_count = 1;
  AdamConfig adam;
  QuasiNewtonConfig qn;
  /// "uniform": constant 1/N (SOS1-feasible interior point);
  /// "random": seeded uniform noise in [0,1].
  std::string init = "uniform";
};

ControlField initial_control(const ControlSystem& system, const SolverSpec& spec,
                             std::uint64_t seed);

/// Samples the in-sample scenarios and runs the chosen solver. The
/// quasi-Newton path uses one fixed set; the Adam path resamples per
/// iteration when its config says so.
SolveTrace run_relaxation(const ControlSystem& system, const TargetSpec& target,
                          const RiskSpec& risk, const NoiseModel& noise,
                          const SolverSpec& spec, std::uint64_t master_seed);

/// The in-sample scenario set a run_relaxation call with this seed uses as
/// its fixed/base set.
ScenarioSet in_sample_scenarios(const ControlSystem& system, const NoiseModel& noise,
                                int scenario_count, std::uint64_t master_seed);

}  // namespace qoc
