#include "qoc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qoc/quantum_core.hpp"
#include "qoc/rng.hpp"

namespace qoc {

std::vector<double> EvaluationReport::pooled() const {
  std::vector<double> all;
  for (const auto& g : per_group_costs) all.insert(all.end(), g.begin(), g.end());
  return all;
}

EvaluationReport out_of_sample(const ControlSystem& system, const ControlField& u,
                               const TargetSpec& target, const NoiseModel& noise,
                               int groups, int per_group, const RiskSpec& risk,
                               std::uint64_t seed,
                               std::optional<double> dp_threshold) {
  if (groups < 1 || per_group < 1) {
    throw std::invalid_argument("out_of_sample: groups and per_group must be >= 1");
  }
  if (u.steps() != system.steps) {
    throw std::invalid_argument("out_of_sample: control grid does not match system");
  }
  validate_risk_spec(risk);

  EvaluationReport report;
  report.group_count = groups;
  report.per_group_costs.resize(groups);
  for (int g = 0; g < groups; ++g) {
    const std::uint64_t group_seed = rng::mix64(seed + static_cast<std::uint64_t>(g));
    const ScenarioSet scenarios =
        sample_scenarios(noise, per_group, system.steps, group_seed);
    report.per_group_costs[g] =
        detail::per_scenario_costs(system, u, scenarios, target, Execution::parallel);
  }

  for (const auto& costs : report.per_group_costs) {
    double mean = 0.0;
    for (double c : costs) mean += c;
    mean /= costs.size();
    double var = 0.0;
    for (double c : costs) var += (c - mean) * (c - mean);
    const double sd = costs.size() > 1 ? std::sqrt(var / (costs.size() - 1)) : 0.0;
    report.group_means.push_back(mean);
    report.group_sds.push_back(sd);
  }

  const std::vector<double> pooled = report.pooled();
  double mean = 0.0;
  for (double c : pooled) mean += c;
  report.pooled_mean = mean / pooled.size();
  const std::vector<double> probs(pooled.size(), 1.0 / pooled.size());
  report.pooled_cvar = cvar_closed_form(pooled, probs, risk.eta);
  report.total = risk.alpha * report.pooled_mean + (1.0 - risk.alpha) * report.pooled_cvar;
  if (dp_threshold) report.dp = distinguished_percentage(pooled, *dp_threshold);
  return report;
}

double distinguished_percentage(const std::vector<double>& costs, double threshold) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("distinguished_percentage: threshold must be positive");
  }
  if (costs.empty()) return 0.0;
  std::size_t below = 0;
  for (double c : costs) {
    if (c < threshold) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(costs.size());
}

double percentile_coverage(const std::vector<double>& in_sample,
                           const std::vector<double>& out_sample, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("percentile_coverage: eta must lie in (0,1)");
  }
  if (in_sample.empty() || out_sample.empty()) {
    throw std::invalid_argument("percentile_coverage: empty sample");
  }
  // Nearest-rank percentile: the ceil(p*n)-th order statistic.
  std::vector<double> sorted = in_sample;
  std::sort(sorted.begin(), sorted.end());
  const double p = 1.0 - eta;
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(sorted.size())));
  const double cut = sorted[std::max<std::size_t>(rank, 1) - 1];

  std::size_t below = 0;
  for (double c : out_sample) {
    if (c < cut) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(out_sample.size());
}

SweepGrid offset_sweep(const ControlSystem& system, const ControlField& u,
                       const TargetSpec& target, const NoiseModel& noise,
                       std::pair<double, double> mu_range, int grid_points,
                       int per_cell, std::uint64_t seed) {
  if (system.controller_count() != 2) {
    throw std::invalid_argument("offset_sweep: instance must have exactly 2 controllers");
  }
  if (grid_points < 2) throw std::invalid_argument("offset_sweep: need >= 2 grid points");
  if (per_cell < 1) throw std::invalid_argument("offset_sweep: per_cell must be >= 1");

  SweepGrid grid;
  grid.mu1_axis.resize(grid_points);
  grid.mu2_axis.resize(grid_points);
  const double lo = mu_range.first;
  const double hi = mu_range.second;
  for (int i = 0; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / (grid_points - 1);
    grid.mu1_axis[i] = lo + (hi - lo) * t;
    grid.mu2_axis[i] = lo + (hi - lo) * t;
  }

  grid.cells = RMatrix::Zero(grid_points, grid_points);
  for (int i = 0; i < grid_points; ++i) {
    for (int j = 0; j < grid_points; ++j) {
      RVector offsets = RVector::Zero(3);  // intrinsic offset stays 0
      offsets(1) = grid.mu1_axis[i];
      offsets(2) = grid.mu2_axis[j];
      const std::uint64_t cell_seed =
          rng::mix64(seed + static_cast<std::uint64_t>(i * grid_points + j));
      const ScenarioSet scenarios =
          fixed_offset_scenarios(noise, offsets, per_cell, system.steps, cell_seed);
      const std::vector<double> costs =
          detail::per_scenario_costs(system, u, scenarios, target, Execution::parallel);
      double mean = 0.0;
      for (double c : costs) mean += c;
      grid.cells(i, j) = mean / per_cell;
    }
  }
  return grid;
}

double percent_change(double metric_sp, double metric_d) {
  if (metric_d == 0.0) {
    throw std::invalid_argument("percent_change: baseline metric is zero");
  }
  return (metric_sp - metric_d) / metric_d;
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json j{{"group_count", report.group_count},
                   {"group_means", report.group_means},
                   {"group_sds", report.group_sds},
                   {"pooled_mean", report.pooled_mean},
                   {"pooled_cvar", report.pooled_cvar},
                   {"total", report.total}};
  if (report.dp) j["dp"] = *report.dp;
  return j;
}

}  // namespace qoc
