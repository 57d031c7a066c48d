#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qoc/evaluation.hpp"
#include "qoc/instances.hpp"
#include "qoc/quantum_core.hpp"
#include "support/oracles.hpp"

using namespace qoc;

namespace {

struct Fixture {
  EnergyInstance inst = build_energy_instance(2, 3, 2.0, 8);
  NoiseModel noise = NoiseModel::from_offset((RVector(3) << 0.0, 0.05, 0.05).finished());
  RiskSpec risk{0.5, 0.05, 0.0};
  ControlField u = constant_control(2, 8, 0.5);
};

}  // namespace

TEST_CASE("out-of-sample aggregation") {
  Fixture fx;

  SUBCASE("zero variance gives identical costs and zero spread") {
    const NoiseModel quiet = NoiseModel::from_offset(RVector::Zero(3));
    const EvaluationReport r = out_of_sample(fx.inst.system, fx.u, fx.inst.target, quiet,
                                             3, 10, fx.risk, 11, fx.inst.dp_threshold);
    for (double sd : r.group_sds) CHECK(sd == doctest::Approx(0.0).epsilon(1e-15));
    const auto pooled = r.pooled();
    for (double c : pooled) CHECK(c == pooled[0]);
    CHECK(r.pooled_cvar == doctest::Approx(r.pooled_mean).epsilon(1e-12));
  }

  SUBCASE("single group pools trivially") {
    const EvaluationReport r = out_of_sample(fx.inst.system, fx.u, fx.inst.target,
                                             fx.noise, 1, 40, fx.risk, 12);
    CHECK(r.group_means[0] == doctest::Approx(r.pooled_mean).epsilon(1e-14));
  }

  SUBCASE("pooled statistics match the concatenated costs") {
    const EvaluationReport r = out_of_sample(fx.inst.system, fx.u, fx.inst.target,
                                             fx.noise, 4, 25, fx.risk, 13);
    const auto pooled = r.pooled();
    const double mean = std::accumulate(pooled.begin(), pooled.end(), 0.0) / pooled.size();
    CHECK(r.pooled_mean == doctest::Approx(mean).epsilon(1e-12));
    const std::vector<double> probs(pooled.size(), 1.0 / pooled.size());
    CHECK(r.pooled_cvar ==
          doctest::Approx(cvar_closed_form(pooled, probs, fx.risk.eta)).epsilon(1e-12));
    CHECK(r.pooled_cvar >= r.pooled_mean - 1e-12);
    CHECK(r.total == doctest::Approx(0.5 * r.pooled_mean + 0.5 * r.pooled_cvar)
                         .epsilon(1e-12));
  }

  SUBCASE("reseeding moves the mean by at most a few standard errors") {
    const EvaluationReport a = out_of_sample(fx.inst.system, fx.u, fx.inst.target,
                                             fx.noise, 5, 400, fx.risk, 21);
    const EvaluationReport b = out_of_sample(fx.inst.system, fx.u, fx.inst.target,
                                             fx.noise, 5, 400, fx.risk, 22);
    const auto pooled = a.pooled();
    double var = 0.0;
    for (double c : pooled) var += (c - a.pooled_mean) * (c - a.pooled_mean);
    var /= (pooled.size() - 1);
    const double se = std::sqrt(var / pooled.size());
    CHECK(std::abs(a.pooled_mean - b.pooled_mean) < 3.0 * std::sqrt(2.0) * se);
  }

  SUBCASE("reports are deterministic given the seed") {
    const EvaluationReport a = out_of_sample(fx.inst.system, fx.u, fx.inst.target,
                                             fx.noise, 2, 30, fx.risk, 33);
    const EvaluationReport b = out_of_sample(fx.inst.system, fx.u, fx.inst.target,
                                             fx.noise, 2, 30, fx.risk, 33);
    CHECK(a.pooled_mean == b.pooled_mean);
    CHECK(a.pooled_cvar == b.pooled_cvar);
  }
}

TEST_CASE("distinguished percentage") {
  CHECK(distinguished_percentage({0.1, 0.2}, 0.5) == 1.0);
  CHECK_THROWS_AS(distinguished_percentage({0.1}, 0.0), std::invalid_argument);
  CHECK(distinguished_percentage({0.1, 0.3, 0.5}, 0.4) == doctest::Approx(2.0 / 3));
  // Monotone in the threshold.
  const std::vector<double> costs{0.05, 0.2, 0.4, 0.6, 0.9};
  double prev = 0.0;
  for (double th : {0.1, 0.3, 0.5, 0.7, 1.0}) {
    const double dp = distinguished_percentage(costs, th);
    CHECK(dp >= prev);
    prev = dp;
  }
}

TEST_CASE("percentile coverage by nearest rank") {
  rng::CounterRng gen(5, 0);
  std::vector<double> sample(200);
  for (double& x : sample) x = gen.uniform01();

  const double within = percentile_coverage(sample, sample, 0.1);
  CHECK(std::abs(within - 0.9) <= 1.0 / sample.size() + 1e-12);

  CHECK(percentile_coverage(sample, {-1.0, -0.5}, 0.1) == 1.0);
  CHECK(percentile_coverage(sample, {2.0, 3.0}, 0.1) == 0.0);
  CHECK_THROWS_AS(percentile_coverage(sample, sample, 0.0), std::invalid_argument);
}

TEST_CASE("offset sweep") {
  Fixture fx;

  SUBCASE("zero fluctuation at the origin reproduces the quiet cost") {
    NoiseModel frozen = fx.noise;
    frozen.sigma_time = RVector::Zero(3);
    const SweepGrid grid = offset_sweep(fx.inst.system, fx.u, fx.inst.target, frozen,
                                        {-0.5, 0.5}, 3, 4, 77);
    const ScenarioSet quiet = zero_noise(3, 8);
    const double f0 = cost(
        propagate(fx.inst.system, fx.u, quiet.scenarios[0]).final_operator(),
        fx.inst.target);
    CHECK(grid.cells(1, 1) == doctest::Approx(f0).epsilon(1e-12));
    CHECK(grid.cells.minCoeff() >= 0.0);
    CHECK(grid.cells.maxCoeff() <= 1.0 + 1e-12);
  }

  SUBCASE("identical controllers make the frozen sweep symmetric") {
    ControlSystem sys;
    sys.qubits = 1;
    sys.total_time = 1.0;
    sys.steps = 4;
    sys.intrinsic = HermitianOperator::zero(2);
    const CMatrix h = test::random_hermitian(2, 8);
    sys.controls.emplace_back(h);
    sys.controls.emplace_back(h);
    sys.x_init = CMatrix::Identity(2, 2);
    const TargetSpec target = TargetSpec::infidelity(random_unitary(2, 9));

    NoiseModel frozen;
    frozen.sigma_offset = RVector::Zero(3);
    frozen.sigma_time = RVector::Zero(3);
    const ControlField u = constant_control(2, 4, 0.5);
    const SweepGrid grid = offset_sweep(sys, u, target, frozen, {-0.4, 0.4}, 5, 1, 3);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        CHECK(grid.cells(i, j) == doctest::Approx(grid.cells(j, i)).epsilon(1e-12));
      }
    }
  }

  SUBCASE("sweeps need a two-controller instance") {
    ControlSystem sys = fx.inst.system;
    sys.controls.push_back(sys.controls[0]);
    CHECK_THROWS_AS(offset_sweep(sys, fx.u, fx.inst.target, fx.noise, {-0.5, 0.5}, 3, 2, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("percent change") {
  CHECK(percent_change(0.9, 1.0) == doctest::Approx(-0.10).epsilon(1e-14));
  CHECK(percent_change(0.4, 0.4) == 0.0);
  CHECK(percent_change(0.15, 0.10) == doctest::Approx(0.50).epsilon(1e-13));
  CHECK_THROWS_AS(percent_change(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("evaluation agrees with the stochastic objective on shared scenarios") {
  Fixture fx;
  const ScenarioSet shared = sample_scenarios(fx.noise, 60, 8, 123);
  const RiskSpec risk{0.5, 0.1, 0.0};
  const ObjectiveBreakdown b = evaluate(fx.inst.system, fx.u, shared, fx.inst.target, risk);

  const std::vector<double> costs =
      detail::per_scenario_costs(fx.inst.system, fx.u, shared, fx.inst.target,
                                 Execution::serial);
  const double mean = std::accumulate(costs.begin(), costs.end(), 0.0) / costs.size();
  const std::vector<double> probs(costs.size(), 1.0 / costs.size());
  CHECK(b.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(b.cvar == doctest::Approx(cvar_closed_form(costs, probs, risk.eta)).epsilon(1e-12));
  CHECK(b.tilde_f == doctest::Approx(0.5 * mean + 0.5 * b.cvar).epsilon(1e-12));
}
