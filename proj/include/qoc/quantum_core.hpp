#pragma once

#include "qoc/system.hpp"
#include "qoc/types.hpp"

namespace qoc {

struct Scenario;  // uncertainty.hpp

enum class PauliAxis { x, y, z };

/// I x ... x sigma_axis x ... x I with the Pauli matrix at 1-based
/// position `site` of a q-qubit register.
HermitianOperator pauli_operator(PauliAxis axis, int site, int qubits);

struct EigenSystem {
  RVector values;
  CMatrix vectors;
};

/// Eigendecomposition of a Hermitian matrix; throws std::runtime_error with
/// matrix diagnostics if the solver does not converge.
EigenSystem eigh(const CMatrix& h);

/// V diag(exp(-i lambda dt)) V† from a precomputed eigensystem.
CMatrix expm_from_eigensystem(const EigenSystem& es, double dt);

/// exp(-i h dt) for Hermitian h, computed spectrally.
CMatrix expm_unitary(const HermitianOperator& h, double dt);

/// (1 + xi_0) H^(0) + sum_j (1 + xi_j) u_j H^(j).
/// u has one entry per controller, xi one per Hamiltonian (index 0 intrinsic).
HermitianOperator assemble_hamiltonian(const ControlSystem& system,
                                       const RVector& u_column,
                                       const RVector& xi_column);

/// Evolves x_init through all T steps under controls u and noise
/// realization xi ((N+1) x T). Keeps per-step eigensystems for gradients.
PropagationResult propagate(const ControlSystem& system, const ControlField& u,
                            const Scenario& xi);

/// Objective value of a final operator:
///   energy:     1 - <psi0| X† H~ X |psi0> / E_min
///   infidelity: 1 - |tr(X_targ† X)| / 2^q
/// An imaginary part >= 1e-9 in the energy expectation signals upstream
/// corruption and throws.
double cost(const CMatrix& x_final, const TargetSpec& target);

/// Exact derivative of cost(propagate(...)) with respect to every control
/// entry, evaluated via the spectral Fréchet derivative of each step
/// exponential chained through the step product (forward/backward
/// accumulation). `prop` must come from propagate(system, u, xi).
RMatrix scenario_gradient(const ControlSystem& system, const ControlField& u,
                          const Scenario& xi, const TargetSpec& target,
                          const PropagationResult& prop);

}  // namespace qoc
