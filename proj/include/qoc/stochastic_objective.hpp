#pragma once

#include <utility>
#include <vector>

#include "qoc/threading.hpp"
#include "qoc/system.hpp"
#include "qoc/uncertainty.hpp"

namespace qoc {

/// Blend weight alpha between expectation (1) and CVaR (0), CVaR risk
/// level eta, and SOS1 penalty weight theta.
struct RiskSpec {
  double alpha = 0.5;
  double eta = 0.05;
  double theta = 0.0;
};

void validate_risk_spec(const RiskSpec& risk);

struct ObjectiveBreakdown {
  std::vector<double> per_scenario;  // F^s(u)
  double mean = 0.0;
  int tail_index = 0;     // s*
  double zeta_star = 0.0; // F^{s*}(u)
  double cvar = 0.0;      // F_C(u)
  double penalty = 0.0;   // F_L(u)
  double tilde_f = 0.0;   // alpha*mean + (1-alpha)*cvar
  double total = 0.0;     // tilde_f + theta*penalty
  bool tie_warning = false;
};

/// The tail scenario s*: attains the smallest value whose strictly-greater
/// probability mass is within eta (the upper eta-quantile). Ties go to the
/// smallest scenario index; the returned flag is true iff another scenario
/// attains exactly the same value.
std::pair<int, bool> select_tail_scenario(const std::vector<double>& values,
                                          const std::vector<double>& probs,
                                          double eta);

/// F^{s*} + (1/eta) * sum_{s: F^s > F^{s*}} p_s (F^s - F^{s*}).
double cvar_closed_form(const std::vector<double>& values,
                        const std::vector<double>& probs, double eta);

/// sum_k (sum_j u_jk - 1)^2.
double penalty_sos1(const ControlField& u);

namespace detail {

/// Per-scenario costs, one propagation each. Parallel over scenarios;
/// results are stored per index so the aggregate is order-independent.
std::vector<double> per_scenario_costs(const ControlSystem& system,
                                       const ControlField& u,
                                       const ScenarioSet& scenarios,
                                       const TargetSpec& target,
                                       Execution exec);

/// Per-scenario costs and analytic gradients from a single propagation per
/// scenario.
void per_scenario_costs_and_gradients(const ControlSystem& system,
                                      const ControlField& u,
                                      const ScenarioSet& scenarios,
                                      const TargetSpec& target, Execution exec,
                                      std::vector<double>& costs,
                                      std::vector<RMatrix>& gradients);

}  // namespace detail

/// Full relaxed objective F_R(u) = alpha * mean + (1-alpha) * F_C +
/// theta * F_L with its per-scenario decomposition. Scenario costs are
/// reduced in ascending scenario order, so the result is independent of
/// thread count.
ObjectiveBreakdown evaluate(const ControlSystem& system, const ControlField& u,
                            const ScenarioSet& scenarios, const TargetSpec& target,
                            const RiskSpec& risk,
                            Execution exec = Execution::parallel);

/// Gradient of F_R at u. At tail ties (where F_C is not differentiable)
/// the same formula is returned as a subgradient surrogate and the flag is
/// set.
std::pair<RMatrix, bool> gradient(const ControlSystem& system, const ControlField& u,
                                  const ScenarioSet& scenarios, const TargetSpec& target,
                                  const RiskSpec& risk,
                                  Execution exec = Execution::parallel);

nlohmann::json breakdown_to_json(const ObjectiveBreakdown& b);

}  // namespace qoc
