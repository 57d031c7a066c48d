#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qoc/rng.hpp"
#include "qoc/rounding.hpp"
#include "qoc/stochastic_objective.hpp"

using namespace qoc;

namespace {

ControlField random_relaxed(int n, int t, std::uint64_t seed) {
  rng::CounterRng gen(seed, rng::fnv1a64("round-test"));
  ControlField u;
  u.values = RMatrix(n, t);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < t; ++k) u.values(j, k) = gen.uniform01();
  }
  return u;
}

ControlField random_sos1(int n, int t, std::uint64_t seed) {
  ControlField u = random_relaxed(n, t, seed);
  for (int k = 0; k < t; ++k) u.values.col(k) /= u.values.col(k).sum();
  return u;
}

}  // namespace

TEST_CASE("binary SOS1 input is reproduced at c_sur = 1") {
  ControlField u;
  u.values = (RMatrix(2, 4) << 1, 0, 0, 1, 0, 1, 1, 0).finished();
  u.binary = true;
  const RoundingConfig cfg{1, RoundingConfig::Mode::sos1};
  const ControlField out = sum_up_rounding(u, cfg, 0.25);
  CHECK((out.values - u.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cumulative_deviation(u, out, cfg, 0.25) == 0.0);
}

TEST_CASE("half-half column splits across the fine grid by tie break") {
  ControlField u;
  u.values = (RMatrix(2, 1) << 0.5, 0.5).finished();
  const RoundingConfig cfg{2, RoundingConfig::Mode::sos1};
  const double dt = 1.0;
  const ControlField out = sum_up_rounding(u, cfg, dt);
  CHECK(out.values(0, 0) == 1.0);
  CHECK(out.values(1, 0) == 0.0);
  CHECK(out.values(0, 1) == 0.0);
  CHECK(out.values(1, 1) == 1.0);
  CHECK(cumulative_deviation(u, out, cfg, dt) == doctest::Approx(0.25 * dt).epsilon(1e-15));
}

TEST_CASE("deterministic controller is preserved on refinement") {
  ControlField u;
  u.values = (RMatrix(2, 1) << 1.0, 0.0).finished();
  const ControlField out = sum_up_rounding(u, {4, RoundingConfig::Mode::sos1}, 0.5);
  for (int k = 0; k < 4; ++k) {
    CHECK(out.values(0, k) == 1.0);
    CHECK(out.values(1, k) == 0.0);
  }
}

TEST_CASE("free mode tracks each controller within half a fine step") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const int t = 8;
    const int c_sur = 1 + static_cast<int>(seed % 4);
    const double dt = 0.3;
    const ControlField u = random_relaxed(n, t, seed);
    const RoundingConfig cfg{c_sur, RoundingConfig::Mode::free};
    const ControlField out = sum_up_rounding(u, cfg, dt);
    CHECK(out.binary);

    // Independent rounding keeps the running integral of every controller
    // within half a fine step.
    const double dt_fine = dt / c_sur;
    RVector gap = RVector::Zero(n);
    for (int k = 0; k < t * c_sur; ++k) {
      gap += (u.values.col(k / c_sur) - out.values.col(k)) * dt_fine;
      CHECK(gap.cwiseAbs().maxCoeff() <= 0.5 * dt_fine + 1e-12);
    }
  }
}

TEST_CASE("sos1 output fires exactly one controller per fine step") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const int n = 2 + static_cast<int>(seed % 4);
    const ControlField u = random_relaxed(n, 11, seed);
    const ControlField out = sum_up_rounding(u, {3, RoundingConfig::Mode::sos1}, 0.2);
    for (int k = 0; k < out.steps(); ++k) {
      double col = 0.0;
      for (int j = 0; j < n; ++j) {
        CHECK((out.values(j, k) == 0.0 || out.values(j, k) == 1.0));
        col += out.values(j, k);
      }
      CHECK(col == 1.0);
    }
  }
}

TEST_CASE("deviation bound holds across a parameter sweep") {
  int checked = 0;
  for (int n : {2, 3, 5}) {
    for (int t : {10, 50}) {
      for (int c_sur : {1, 2, 4, 8}) {
        for (int rep = 0; rep < 8; ++rep) {
          const std::uint64_t seed = 10000 + 97 * checked;
          const ControlField u = random_relaxed(n, t, seed);
          const double dt = 0.25;
          const double t_f = dt * t;
          const RoundingConfig cfg{c_sur, RoundingConfig::Mode::sos1};
          const ControlField out = sum_up_rounding(u, cfg, dt);
          const double deviation = cumulative_deviation(u, out, cfg, dt);
          const double bound = bound_rhs(n, cfg, dt, t_f, penalty_sos1(u));
          CHECK(deviation <= bound + 1e-12);
          ++checked;
        }
      }
    }
  }
  CHECK(checked == 3 * 2 * 4 * 8);
}

TEST_CASE("SOS1-exact inputs decay like 1/c_sur") {
  const int n = 3, t = 12;
  const double dt = 0.4;
  std::vector<double> xs, ys;
  for (int c_sur : {1, 2, 4, 8, 16, 32}) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ControlField u = random_sos1(n, t, 555 + seed);
      const RoundingConfig cfg{c_sur, RoundingConfig::Mode::sos1};
      const ControlField out = sum_up_rounding(u, cfg, dt);
      const double deviation = cumulative_deviation(u, out, cfg, dt);
      CHECK(deviation <= (n - 1) * dt / c_sur + 1e-12);
      worst = std::max(worst, deviation);
    }
    xs.push_back(std::log(static_cast<double>(c_sur)));
    ys.push_back(std::log(worst));
  }
  // Least-squares slope of log(deviation) against log(c_sur).
  const double count = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  CHECK(slope > -1.2);
  CHECK(slope < -0.8);
}

TEST_CASE("rounding conserves controller mass up to the bound") {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const int t = 14;
    const int c_sur = 1 + static_cast<int>(seed % 5);
    const double dt = 0.3;
    const ControlField u = random_relaxed(n, t, seed);
    const RoundingConfig cfg{c_sur, RoundingConfig::Mode::sos1};
    const ControlField out = sum_up_rounding(u, cfg, dt);
    const double bound = bound_rhs(n, cfg, dt, dt * t, penalty_sos1(u));
    for (int j = 0; j < n; ++j) {
      const double mass_bin = out.values.row(j).sum() * dt / c_sur;
      const double mass_con = u.values.row(j).sum() * dt;
      CHECK(std::abs(mass_bin - mass_con) <= bound + 1e-12);
    }
  }
}

TEST_CASE("bound arithmetic") {
  CHECK(bound_rhs(2, {4, RoundingConfig::Mode::sos1}, 0.1, 1.0, 0.0) ==
        doctest::Approx(0.025).epsilon(1e-15));
  CHECK(bound_rhs(1, {3, RoundingConfig::Mode::sos1}, 0.7, 2.1, 0.0) == 0.0);
  CHECK(bound_rhs(2, {4, RoundingConfig::Mode::sos1}, 0.1, 5.0, 0.5) ==
        doctest::Approx(0.025 + 1.5 * std::sqrt(0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(bound_rhs(2, {0, RoundingConfig::Mode::sos1}, 0.1, 1.0, 0.0),
                  std::invalid_argument);
}
