#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qoc/stochastic_objective.hpp"
#include "qoc/system.hpp"
#include "qoc/uncertainty.hpp"

namespace qoc {

struct EvaluationReport {
  int group_count = 0;
  std::vector<std::vector<double>> per_group_costs;
  std::vector<double> group_means;
  std::vector<double> group_sds;
  double pooled_mean = 0.0;
  double pooled_cvar = 0.0;
  double total = 0.0;  // alpha-blend of pooled mean and cvar
  std::optional<double> dp;  // fraction below the instance threshold

  std::vector<double> pooled() const;
};

/// Out-of-sample test: draws groups x per_group fresh scenarios on the
/// grid of u (binary controls live on the fine grid), evaluates the cost
/// of every scenario, and aggregates. CVaR is the closed form on the
/// pooled cost vector at risk.eta; dp is filled when a threshold is given.
EvaluationReport out_of_sample(const ControlSystem& system, const ControlField& u,
                               const TargetSpec& target, const NoiseModel& noise,
                               int groups, int per_group, const RiskSpec& risk,
                               std::uint64_t seed,
                               std::optional<double> dp_threshold = std::nullopt);

/// Fraction of costs strictly below threshold.
double distinguished_percentage(const std::vector<double>& costs, double threshold);

/// Empirical (1-eta) percentile of the in-sample costs by nearest rank
/// (ceil(p*n)-th order statistic), then the fraction of out-of-sample
/// costs strictly below it.
double percentile_coverage(const std::vector<double>& in_sample,
                           const std::vector<double>& out_sample, double eta);

struct SweepGrid {
  std::vector<double> mu1_axis;
  std::vector<double> mu2_axis;
  RMatrix cells;  // average cost, mu1 axis along rows
};

/// Average cost of u over per_cell fixed-offset scenarios for every
/// (mu1, mu2) grid point; offsets apply to the two controllers of the
/// instance (intrinsic offset stays zero).
SweepGrid offset_sweep(const ControlSystem& system, const ControlField& u,
                       const TargetSpec& target, const NoiseModel& noise,
                       std::pair<double, double> mu_range, int grid_points,
                       int per_cell, std::uint64_t seed);

/// (metric_sp - metric_d) / metric_d. Rejects metric_d = 0.
double percent_change(double metric_sp, double metric_d);

nlohmann::json report_to_json(const EvaluationReport& report);

}  // namespace qoc
