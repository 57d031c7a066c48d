#pragma once

#include <functional>
#include <vector>

#include "qoc/system.hpp"
#include "qoc/types.hpp"

namespace qoc {

/// Objective/gradient pair over the control matrix for one fixed scenario
/// set.
struct ProblemFunctions {
  std::function<double(const RMatrix&)> value;
  std::function<RMatrix(const RMatrix&)> gradient;
};

/// Supplies the (possibly resampled) problem for iteration i >= 1.
/// Solvers with fixed samples call it once with i = 0.
using ProblemFactory = std::function<ProblemFunctions(int iteration)>;

struct AdamConfig {
  int max_iter = 200;      // K
  double gamma1 = 0.05;    // initial step size
  double gamma2 = 0.01;    // step size after the threshold is crossed
  double f_bar = 0.0;      // objective threshold for the switch; <= 0 disables
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool resample = true;    // fresh scenario set each iteration
};

struct QuasiNewtonConfig {
  int memory = 10;           // stored curvature pairs
  int max_iter = 200;
  double grad_tol = 1e-6;    // projected-gradient infinity-norm stop
  double f_tol = 0.0;        // relative decrease stop; <= 0 disables
  int max_line_search = 30;
};

struct SolveTrace {
  ControlField u_final;
  std::vector<double> objective_history;
  std::vector<double> gradient_norm_history;
  int iterations_used = 0;
  double wall_time_seconds = 0.0;
  bool line_search_warning = false;
};

/// Elementwise clamp to [0,1].
RMatrix project_box(const RMatrix& u);

/// Projected Adam. Per iteration: draw the iteration's problem (resample
/// on), take the bias-corrected moment step, clamp to the box, and switch
/// the step size from gamma1 to gamma2 permanently once the objective
/// drops below f_bar. Throws on a non-finite objective or gradient, naming
/// the iteration.
SolveTrace solve_adam(const ProblemFactory& factory, const ControlField& u0,
                      const AdamConfig& cfg);

/// Bound-constrained limited-memory quasi-Newton on [0,1]^{N x T}:
/// gradient projection identifies the active faces, the two-loop recursion
/// runs on the free variables, and a backtracking Armijo line search keeps
/// the objective history non-increasing. Line-search failure returns the
/// best iterate with the warning flag set.
SolveTrace solve_quasi_newton(const ProblemFunctions& problem, const ControlField& u0,
                              const QuasiNewtonConfig& cfg);

}  // namespace qoc
