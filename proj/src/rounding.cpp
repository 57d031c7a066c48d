#include "qoc/rounding.hpp"

#include <cmath>
#include <stdexcept>

namespace qoc {

namespace {

// Deviations within this window of the maximum count as tied, so the
// smallest-index rule is not decided by last-bit float noise.
constexpr double kTieWindow = 1e-15;

void check_config(const RoundingConfig& cfg) {
  if (cfg.c_sur < 1) throw std::invalid_argument("RoundingConfig: c_sur must be >= 1");
}

// 1-based fine step tau lives in coarse interval ceil(tau / c_sur); with
// the 0-based indices used here that is tau / c_sur.
inline int coarse_of(int fine_step, int c_sur) { return fine_step / c_sur; }

}  // namespace

ControlField sum_up_rounding(const ControlField& u_con, const RoundingConfig& cfg,
                             double dt) {
  check_config(cfg);
  validate_control_field(u_con);
  const int n = u_con.controllers();
  const int fine_steps = cfg.c_sur * u_con.steps();
  const double dt_fine = dt / cfg.c_sur;

  ControlField u_bin;
  u_bin.values = RMatrix::Zero(n, fine_steps);
  u_bin.binary = true;

  RVector acc_con = RVector::Zero(n);  // integral of u_con up to the current fine step
  RVector acc_bin = RVector::Zero(n);
  for (int k = 0; k < fine_steps; ++k) {
    const int c = coarse_of(k, cfg.c_sur);
    acc_con += u_con.values.col(c) * dt_fine;
    const RVector deviation = acc_con - acc_bin;

    if (cfg.mode == RoundingConfig::Mode::sos1) {
      int best = 0;
      for (int j = 1; j < n; ++j) {
        if (deviation(j) > deviation(best) + kTieWindow) best = j;
      }
      u_bin.values(best, k) = 1.0;
      acc_bin(best) += dt_fine;
    } else {
      for (int j = 0; j < n; ++j) {
        if (deviation(j) >= 0.5 * dt_fine) {
          u_bin.values(j, k) = 1.0;
          acc_bin(j) += dt_fine;
        }
      }
    }
  }
  return u_bin;
}

double cumulative_deviation(const ControlField& u_con, const ControlField& u_bin,
                            const RoundingConfig& cfg, double dt) {
  check_config(cfg);
  const int n = u_con.controllers();
  const int fine_steps = cfg.c_sur * u_con.steps();
  if (u_bin.controllers() != n || u_bin.steps() != fine_steps) {
    throw std::invalid_argument("cumulative_deviation: grids do not match the config");
  }
  const double dt_fine = dt / cfg.c_sur;

  RVector gap = RVector::Zero(n);
  double worst = 0.0;
  for (int k = 0; k < fine_steps; ++k) {
    const int c = coarse_of(k, cfg.c_sur);
    gap += (u_con.values.col(c) - u_bin.values.col(k)) * dt_fine;
    worst = std::max(worst, gap.cwiseAbs().maxCoeff());
  }
  return worst;
}

double bound_rhs(int controllers, const RoundingConfig& cfg, double dt, double t_f,
                 double f_l) {
  check_config(cfg);
  if (f_l < 0.0) throw std::invalid_argument("bound_rhs: penalty value must be >= 0");
  const double n = controllers;
  return (n - 1.0) * dt / cfg.c_sur + (2.0 * n - 1.0) / n * std::sqrt(t_f * f_l * dt);
}

}  // namespace qoc
