#pragma once

#include "qoc/system.hpp"

namespace qoc {

struct RoundingConfig {
  enum class Mode { sos1, free };

  int c_sur = 1;  // fine grid has c_sur * T steps
  Mode mode = Mode::sos1;
};

/// Sum-up rounding from the coarse continuous grid (N x T) to the fine
/// binary grid (N x c_sur*T). Each fine step activates the controller with
/// the largest cumulative deviation (ties to the smallest index); in free
/// mode every controller whose deviation reaches half a fine step is
/// activated. dt is the coarse step length.
ControlField sum_up_rounding(const ControlField& u_con, const RoundingConfig& cfg,
                             double dt);

/// max over fine steps k of
///   || sum_{tau<=k} (u_con[., coarse(tau)] - u_bin[., tau]) * dt/c_sur ||_inf,
/// the discrete control-integral gap between the two grids.
double cumulative_deviation(const ControlField& u_con, const ControlField& u_bin,
                            const RoundingConfig& cfg, double dt);

/// (N-1) * dt / c_sur + ((2N-1)/N) * sqrt(t_f * f_l * dt), the guaranteed
/// ceiling on cumulative_deviation for SOS1-mode rounding, where f_l is the
/// SOS1 penalty of the continuous control.
double bound_rhs(int controllers, const RoundingConfig& cfg, double dt, double t_f,
                 double f_l);

}  // namespace qoc
