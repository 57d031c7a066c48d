#include "qoc/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace qoc {

namespace {

bool all_finite(const RMatrix& m) { return m.allFinite(); }

double inf_norm(const RMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

RMatrix project_box(const RMatrix& u) {
  return u.cwiseMax(0.0).cwiseMin(1.0);
}

SolveTrace solve_adam(const ProblemFactory& factory, const ControlField& u0,
                      const AdamConfig& cfg) {
  validate_control_field(u0);
  const auto start = Clock::now();

  RMatrix u = u0.values;
  RMatrix m = RMatrix::Zero(u.rows(), u.cols());
  RMatrix v = RMatrix::Zero(u.rows(), u.cols());
  double step = cfg.gamma1;
  bool switched = false;

  SolveTrace trace;
  trace.objective_history.reserve(cfg.max_iter);
  trace.gradient_norm_history.reserve(cfg.max_iter);

  ProblemFunctions fixed;
  if (!cfg.resample) fixed = factory(0);

  for (int i = 1; i <= cfg.max_iter; ++i) {
    if (cfg.resample) fixed = factory(i);
    const ProblemFunctions& problem = fixed;

    const RMatrix g = problem.gradient(u);
    if (!all_finite(g)) {
      std::ostringstream os;
      os << "solve_adam: non-finite gradient at iteration " << i;
      throw std::runtime_error(os.str());
    }
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const double bc1 = 1.0 - std::pow(cfg.beta1, i);
    const double bc2 = 1.0 - std::pow(cfg.beta2, i);
    const RMatrix m_hat = m / bc1;
    const RMatrix v_hat = v / bc2;
    u = project_box(u - step * (m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon)).matrix());

    const double f = problem.value(u);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "solve_adam: non-finite objective at iteration " << i;
      throw std::runtime_error(os.str());
    }
    trace.objective_history.push_back(f);
    trace.gradient_norm_history.push_back(inf_norm(g));
    // The step-size switch latches: once the objective dips under f_bar the
    // smaller step is kept for good.
    if (!switched && cfg.f_bar > 0.0 && f < cfg.f_bar) {
      step = cfg.gamma2;
      switched = true;
    }
  }

  trace.u_final.values = std::move(u);
  trace.u_final.binary = false;
  trace.iterations_used = cfg.max_iter;
  trace.wall_time_seconds = seconds_since(start);
  return trace;
}

namespace {

struct CurvaturePair {
  RMatrix s;
  RMatrix y;
  double sy;
};

// Two-loop recursion restricted to the free variables (active entries of
// g are already zeroed by the caller).
RMatrix two_loop_direction(const std::deque<CurvaturePair>& pairs, const RMatrix& g) {
  RMatrix q = g;
  std::vector<double> alpha(pairs.size());
  for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
    alpha[i] = pairs[i].s.cwiseProduct(q).sum() / pairs[i].sy;
    q -= alpha[i] * pairs[i].y;
  }
  if (!pairs.empty()) {
    const auto& last = pairs.back();
    const double yy = last.y.cwiseProduct(last.y).sum();
    if (yy > 0.0) q *= last.sy / yy;
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].y.cwiseProduct(q).sum() / pairs[i].sy;
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return -q;
}

}  // namespace

SolveTrace solve_quasi_newton(const ProblemFunctions& problem, const ControlField& u0,
                              const QuasiNewtonConfig& cfg) {
  validate_control_field(u0);
  if (cfg.memory < 1) throw std::invalid_argument("solve_quasi_newton: memory must be >= 1");
  const auto start = Clock::now();
  constexpr double kArmijo = 1e-4;

  RMatrix u = project_box(u0.values);
  double f = problem.value(u);
  RMatrix g = problem.gradient(u);
  if (!std::isfinite(f) || !all_finite(g)) {
    throw std::runtime_error("solve_quasi_newton: non-finite objective at start");
  }

  SolveTrace trace;
  trace.objective_history.push_back(f);
  std::deque<CurvaturePair> pairs;
  int iter = 0;

  for (; iter < cfg.max_iter; ++iter) {
    const RMatrix projected_gradient = u - project_box(u - g);
    const double pg_norm = inf_norm(projected_gradient);
    trace.gradient_norm_history.push_back(pg_norm);
    if (pg_norm <= cfg.grad_tol) break;

    // Active box faces: at a bound with the gradient pushing outward.
    RMatrix g_free = g;
    for (Eigen::Index idx = 0; idx < u.size(); ++idx) {
      const bool at_lower = u(idx) <= 0.0 && g(idx) > 0.0;
      const bool at_upper = u(idx) >= 1.0 && g(idx) < 0.0;
      if (at_lower || at_upper) g_free(idx) = 0.0;
    }

    RMatrix d = two_loop_direction(pairs, g_free);
    for (Eigen::Index idx = 0; idx < u.size(); ++idx) {
      if (g_free(idx) == 0.0 && g(idx) != 0.0) d(idx) = 0.0;
    }
    if (d.cwiseProduct(g).sum() >= 0.0) d = -g_free;  // not a descent direction

    // Backtracking Armijo search along the projected path.
    double t = 1.0;
    bool accepted = false;
    RMatrix u_next;
    double f_next = f;
    for (int ls = 0; ls <= cfg.max_line_search; ++ls) {
      u_next = project_box(u + t * d);
      const double decrease = g.cwiseProduct(u_next - u).sum();
      f_next = problem.value(u_next);
      if (std::isfinite(f_next) && f_next <= f + kArmijo * decrease && f_next <= f) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      trace.line_search_warning = true;
      break;
    }

    RMatrix g_next = problem.gradient(u_next);
    if (!all_finite(g_next)) {
      throw std::runtime_error("solve_quasi_newton: non-finite gradient");
    }
    CurvaturePair pair;
    pair.s = u_next - u;
    pair.y = g_next - g;
    pair.sy = pair.s.cwiseProduct(pair.y).sum();
    if (pair.sy > 1e-10 * pair.s.norm() * pair.y.norm()) {
      pairs.push_back(std::move(pair));
      if (static_cast<int>(pairs.size()) > cfg.memory) pairs.pop_front();
    }

    const double drop = f - f_next;
    u = std::move(u_next);
    f = f_next;
    g = std::move(g_next);
    trace.objective_history.push_back(f);
    if (cfg.f_tol > 0.0 && drop <= cfg.f_tol * std::max(1.0, std::abs(f))) {
      ++iter;
      break;
    }
  }

  trace.u_final.values = std::move(u);
  trace.u_final.binary = false;
  trace.iterations_used = iter;
  trace.wall_time_seconds = seconds_since(start);
  return trace;
}

}  // namespace qoc
