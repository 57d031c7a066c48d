#pragma once

#include <vector>

#include "qoc/matrix.hpp"
#include "qoc/types.hpp"

namespace qoc {

/// Discretized controlled quantum system: q qubits evolved over [0, t_f]
/// in T uniform steps under an intrinsic Hamiltonian plus N switchable
/// control Hamiltonians.
struct ControlSystem {
  int qubits = 0;
  double total_time = 0.0;  // t_f
  int steps = 0;            // T
  HermitianOperator intrinsic;
  std::vector<HermitianOperator> controls;
  CMatrix x_init;

  int controller_count() const { return static_cast<int>(controls.size()); }
  Eigen::Index dim() const { return Eigen::Index(1) << qubits; }
  double dt() const { return total_time / steps; }

  /// Same physics on a refined grid with factor * steps time steps.
  ControlSystem refined(int factor) const;
};

/// Throws std::invalid_argument on dimension mismatches or a non-unitary
/// initial operator.
void validate_system(const ControlSystem& system);

/// Control values per controller per time step (N x T). Relaxed values lie
/// in [0,1]; binary ones in {0,1}.
struct ControlField {
  RMatrix values;  // N rows, T columns
  bool binary = false;

  int controllers() const { return static_cast<int>(values.rows()); }
  int steps() const { return static_cast<int>(values.cols()); }
};

ControlField constant_control(int controllers, int steps, double value);

void validate_control_field(const ControlField& u);

/// Optimization target: either drive the system energy (w.r.t. h_tilde)
/// toward its ground level, or match a target unitary.
struct TargetSpec {
  enum class Kind { energy, infidelity };

  Kind kind = Kind::infidelity;

  // energy kind
  HermitianOperator h_tilde;
  CVector psi0;
  double e_min = 0.0;

  // infidelity kind
  CMatrix x_targ;

  static TargetSpec energy(HermitianOperator h_tilde, CVector psi0, double e_min);
  static TargetSpec infidelity(CMatrix x_targ);
};

/// Per-step evolution data. cumulative[k] is the operator after k steps
/// (cumulative[0] = x_init); the eigensystem of each step Hamiltonian is
/// kept for gradient reuse.
struct PropagationResult {
  std::vector<CMatrix> step_unitaries;    // T entries
  std::vector<CMatrix> cumulative;        // T+1 entries
  std::vector<RVector> eigenvalues;       // T entries
  std::vector<CMatrix> eigenvectors;      // T entries

  const CMatrix& final_operator() const { return cumulative.back(); }
};

}  // namespace qoc
