#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qoc/types.hpp"

namespace qoc {

/// Two-level Gaussian noise: per scenario, each Hamiltonian j draws an
/// offset mu_j ~ N(0, sigma_offset[j]) held for the whole horizon, and the
/// per-step values xi_jk ~ N(mu_j, sigma_time[j]) fluctuate around it.
/// Index 0 is the intrinsic Hamiltonian.
struct NoiseModel {
  RVector sigma_offset;  // length N+1
  RVector sigma_time;    // length N+1
  double time_offset_ratio = 0.1;

  /// sigma_offset = given levels, sigma_time = time_offset_ratio * levels.
  static NoiseModel from_offset(RVector sigma_offset, double time_offset_ratio = 0.1);

  int hamiltonian_count() const { return static_cast<int>(sigma_offset.size()); }
};

void validate_noise_model(const NoiseModel& model);

/// One sampled uncertainty realization over all Hamiltonians and steps.
struct Scenario {
  RMatrix xi;       // (N+1) x T, row 0 intrinsic
  RVector offsets;  // length N+1, the sampled mu_j
  double probability = 1.0;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::uint64_t seed = 0;
  NoiseModel model;

  int size() const { return static_cast<int>(scenarios.size()); }
};

/// Draws S scenarios on a T-step grid. Scenario s uses counter stream
/// (seed, s), so equal (model, S, T, seed) give bit-identical output no
/// matter how many threads or in which order scenarios are generated.
/// All probabilities are 1/S.
ScenarioSet sample_scenarios(const NoiseModel& model, int count, int steps,
                             std::uint64_t seed);

/// Like sample_scenarios but with the offsets pinned to the given values
/// for every scenario; only the per-step fluctuation is drawn. Used by the
/// offset sweep evaluations.
ScenarioSet fixed_offset_scenarios(const NoiseModel& model, const RVector& offsets,
                                   int count, int steps, std::uint64_t seed);

/// All-zero noise (single scenario, probability 1).
ScenarioSet zero_noise(int hamiltonians, int steps);

nlohmann::json scenario_set_to_json(const ScenarioSet& set);
ScenarioSet scenario_set_from_json(const nlohmann::json& j);

}  // namespace qoc
