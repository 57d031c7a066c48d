#include "qoc/stochastic_objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qoc/quantum_core.hpp"

namespace qoc {

void validate_risk_spec(const RiskSpec& risk) {
  if (!(risk.alpha >= 0.0 && risk.alpha <= 1.0)) {
    throw std::invalid_argument("RiskSpec: alpha must lie in [0,1]");
  }
  if (!(risk.eta > 0.0 && risk.eta <= 1.0)) {
    throw std::invalid_argument("RiskSpec: eta must lie in (0,1]");
  }
  if (!(risk.theta >= 0.0)) {
    throw std::invalid_argument("RiskSpec: theta must be non-negative");
  }
}

std::pair<int, bool> select_tail_scenario(const std::vector<double>& values,
                                          const std::vector<double>& probs,
                                          double eta) {
  const int s_count = static_cast<int>(values.size());
  if (s_count == 0) throw std::invalid_argument("select_tail_scenario: empty values");
  if (probs.size() != values.size()) {
    throw std::invalid_argument("select_tail_scenario: probs length mismatch");
  }

  std::vector<int> order(s_count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });

  // Walk distinct values in descending order, tracking the probability
  // mass strictly above each. The tail value is the smallest one whose
  // strictly-greater mass still fits inside eta; that is the upper
  // eta-quantile (VaR), the smallest minimizer of the auxiliary problem.
  // The maximum always qualifies (mass 0), so a tail scenario exists for
  // every input.
  int chosen = order[0];
  double mass_above = 0.0;
  int i = 0;
  while (i < s_count) {
    const double v = values[order[i]];
    int block_end = i;
    double block_mass = 0.0;
    while (block_end < s_count && values[order[block_end]] == v) {
      block_mass += probs[order[block_end]];
      ++block_end;
    }
    if (mass_above > eta) break;
    chosen = order[i];  // smallest index within the value block
    mass_above += block_mass;
    i = block_end;
  }

  int same = 0;
  for (int s = 0; s < s_count; ++s) {
    if (values[s] == values[chosen]) ++same;
  }
  return {chosen, same > 1};
}

double cvar_closed_form(const std::vector<double>& values,
                        const std::vector<double>& probs, double eta) {
  const auto [s_star, tie] = select_tail_scenario(values, probs, eta);
  (void)tie;
  const double zeta = values[s_star];
  double excess = 0.0;
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (values[s] > zeta) excess += probs[s] * (values[s] - zeta);
  }
  return zeta + excess / eta;
}

double penalty_sos1(const ControlField& u) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < u.values.cols(); ++k) {
    const double gap = u.values.col(k).sum() - 1.0;
    total += gap * gap;
  }
  return total;
}

namespace detail {

std::vector<double> per_scenario_costs(const ControlSystem& system,
                                       const ControlField& u,
                                       const ScenarioSet& scenarios,
                                       const TargetSpec& target, Execution exec) {
  std::vector<double> costs(scenarios.size());
  for_each_index(scenarios.size(), exec, [&](int s) {
    const PropagationResult prop = propagate(system, u, scenarios.scenarios[s]);
    costs[s] = cost(prop.final_operator(), target);
  });
  return costs;
}

void per_scenario_costs_and_gradients(const ControlSystem& system,
                                      const ControlField& u,
                                      const ScenarioSet& scenarios,
                                      const TargetSpec& target, Execution exec,
                                      std::vector<double>& costs,
                                      std::vector<RMatrix>& gradients) {
  costs.assign(scenarios.size(), 0.0);
  gradients.assign(scenarios.size(), RMatrix());
  for_each_index(scenarios.size(), exec, [&](int s) {
    const PropagationResult prop = propagate(system, u, scenarios.scenarios[s]);
    costs[s] = cost(prop.final_operator(), target);
    gradients[s] = scenario_gradient(system, u, scenarios.scenarios[s], target, prop);
  });
}

}  // namespace detail

namespace {

double probability_weighted_mean(const std::vector<double>& values,
                                 const std::vector<Scenario>& scenarios) {
  double mean = 0.0;
  for (std::size_t s = 0; s < values.size(); ++s) {
    mean += scenarios[s].probability * values[s];
  }
  return mean;
}

std::vector<double> probabilities(const ScenarioSet& set) {
  std::vector<double> p(set.scenarios.size());
  for (std::size_t s = 0; s < p.size(); ++s) p[s] = set.scenarios[s].probability;
  return p;
}

}  // namespace

ObjectiveBreakdown evaluate(const ControlSystem& system, const ControlField& u,
                            const ScenarioSet& scenarios, const TargetSpec& target,
                            const RiskSpec& risk, Execution exec) {
  validate_risk_spec(risk);
  validate_control_field(u);

  ObjectiveBreakdown b;
  b.per_scenario = detail::per_scenario_costs(system, u, scenarios, target, exec);
  const std::vector<double> probs = probabilities(scenarios);
  b.mean = probability_weighted_mean(b.per_scenario, scenarios.scenarios);
  std::tie(b.tail_index, b.tie_warning) =
      select_tail_scenario(b.per_scenario, probs, risk.eta);
  b.zeta_star = b.per_scenario[b.tail_index];
  b.cvar = cvar_closed_form(b.per_scenario, probs, risk.eta);
  b.penalty = penalty_sos1(u);
  b.tilde_f = risk.alpha * b.mean + (1.0 - risk.alpha) * b.cvar;
  b.total = b.tilde_f + risk.theta * b.penalty;
  return b;
}

std::pair<RMatrix, bool> gradient(const ControlSystem& system, const ControlField& u,
                                  const ScenarioSet& scenarios, const TargetSpec& target,
                                  const RiskSpec& risk, Execution exec) {
  validate_risk_spec(risk);
  validate_control_field(u);

  std::vector<double> costs;
  std::vector<RMatrix> grads;
  detail::per_scenario_costs_and_gradients(system, u, scenarios, target, exec, costs,
                                           grads);
  const std::vector<double> probs = probabilities(scenarios);
  const auto [s_star, tie] = select_tail_scenario(costs, probs, risk.eta);
  const double zeta = costs[s_star];

  // Scenario weights: alpha p_s everywhere, plus the CVaR chain-rule
  // weights on the tail set and the tail scenario itself.
  std::vector<double> weights(costs.size());
  double tail_mass = 0.0;
  for (std::size_t s = 0; s < costs.size(); ++s) {
    if (costs[s] > zeta) tail_mass += probs[s];
  }
  for (std::size_t s = 0; s < costs.size(); ++s) {
    double w = risk.alpha * probs[s];
    if (risk.alpha < 1.0) {
      if (static_cast<int>(s) == s_star) {
        w += (1.0 - risk.alpha) * (1.0 - tail_mass / risk.eta);
      } else if (costs[s] > zeta) {
        w += (1.0 - risk.alpha) * probs[s] / risk.eta;
      }
    }
    weights[s] = w;
  }

  RMatrix g = RMatrix::Zero(u.values.rows(), u.values.cols());
  for (std::size_t s = 0; s < grads.size(); ++s) {
    if (weights[s] != 0.0) g += weights[s] * grads[s];
  }
  if (risk.theta != 0.0) {
    for (Eigen::Index k = 0; k < u.values.cols(); ++k) {
      const double colgap = 2.0 * risk.theta * (u.values.col(k).sum() - 1.0);
      for (Eigen::Index j = 0; j < u.values.rows(); ++j) g(j, k) += colgap;
    }
  }
  return {std::move(g), tie};
}

nlohmann::json breakdown_to_json(const ObjectiveBreakdown& b) {
  return nlohmann::json{{"per_scenario", b.per_scenario},
                        {"mean", b.mean},
                        {"tail_index", b.tail_index},
                        {"zeta_star", b.zeta_star},
                        {"cvar", b.cvar},
                        {"penalty", b.penalty},
                        {"tilde_f", b.tilde_f},
                        {"total", b.total},
                        {"tie_warning", b.tie_warning}};
}

}  // namespace qoc
