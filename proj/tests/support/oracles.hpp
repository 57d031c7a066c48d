#pragma once

// Test-only reference implementations. Everything here recomputes results
// along an independent route (series expansion, dense enumeration, finite
// differences) and must not call the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "qoc/rng.hpp"
#include "qoc/types.hpp"

namespace qoc::test {

/// Truncated series for exp(-i h dt), with enough terms that the tail is
/// far below 1e-12 for the step norms used in tests.
inline CMatrix taylor_expm(const CMatrix& h, double dt, int terms = 40) {
  const Eigen::Index d = h.rows();
  CMatrix acc = CMatrix::Identity(d, d);
  CMatrix power = CMatrix::Identity(d, d);
  const CMatrix a = Complex(0.0, -dt) * h;
  for (int n = 1; n <= terms; ++n) {
    power = (power * a / static_cast<double>(n)).eval();
    acc += power;
  }
  return acc;
}

inline CMatrix random_hermitian(Eigen::Index dim, std::uint64_t seed, double scale = 1.0) {
  rng::CounterRng gen(seed, rng::fnv1a64("test-hermitian"));
  CMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    m(r, r) = Complex(scale * gen.uniform(-1.0, 1.0), 0.0);
    for (Eigen::Index c = r + 1; c < dim; ++c) {
      const Complex v(scale * gen.uniform(-1.0, 1.0), scale * gen.uniform(-1.0, 1.0));
      m(r, c) = v;
      m(c, r) = std::conj(v);
    }
  }
  return m;
}

/// zeta + (1/eta) sum_s p_s max(0, v_s - zeta).
inline double cvar_auxiliary(const std::vector<double>& values,
                             const std::vector<double>& probs, double eta,
                             double zeta) {
  double acc = zeta;
  for (std::size_t s = 0; s < values.size(); ++s) {
    acc += probs[s] * std::max(0.0, values[s] - zeta) / eta;
  }
  return acc;
}

/// Exact minimum of the auxiliary objective: piecewise linear and convex in
/// zeta, so the minimum sits on a breakpoint (one of the values).
inline double breakpoint_cvar(const std::vector<double>& values,
                              const std::vector<double>& probs, double eta) {
  double best = cvar_auxiliary(values, probs, eta, values[0]);
  for (double zeta : values) {
    best = std::min(best, cvar_auxiliary(values, probs, eta, zeta));
  }
  return best;
}

/// Brute-force minimum over a dense zeta grid spanning [min, max].
inline double grid_cvar(const std::vector<double>& values,
                        const std::vector<double>& probs, double eta, int points) {
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double best = cvar_auxiliary(values, probs, eta, lo);
  for (int i = 1; i < points; ++i) {
    const double zeta = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    best = std::min(best, cvar_auxiliary(values, probs, eta, zeta));
  }
  return best;
}

/// Central finite differences of a scalar function of a control matrix.
inline RMatrix finite_difference_gradient(const std::function<double(const RMatrix&)>& f,
                                          const RMatrix& u, double h = 1e-6) {
  RMatrix g(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.rows(); ++j) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      RMatrix up = u, dn = u;
      up(j, k) += h;
      dn(j, k) -= h;
      g(j, k) = (f(up) - f(dn)) / (2.0 * h);
    }
  }
  return g;
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Two-sided Kolmogorov-Smirnov statistic against the standard normal.
inline double ks_statistic_normal(std::vector<double> draws) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double cdf = norm_cdf(draws[i]);
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

}  // namespace qoc::test
