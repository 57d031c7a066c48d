#include "qoc/quantum_core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "qoc/uncertainty.hpp"

namespace qoc {

namespace {

// Two eigenvalues closer than this share the divided-difference limit.
constexpr double kDegenerateTol = 1e-12;
// |tr| below this makes the infidelity phase undefined; subgradient 0.
constexpr double kTracePhaseTol = 1e-14;

CMatrix pauli_matrix(PauliAxis axis) {
  CMatrix s(2, 2);
  switch (axis) {
    case PauliAxis::x:
      s << 0, 1, 1, 0;
      break;
    case PauliAxis::y:
      s << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case PauliAxis::z:
      s << 1, 0, 0, -1;
      break;
  }
  return s;
}

}  // namespace

ControlSystem ControlSystem::refined(int factor) const {
  ControlSystem fine = *this;
  fine.steps = steps * factor;
  return fine;
}

void validate_system(const ControlSystem& system) {
  if (system.qubits < 1) throw std::invalid_argument("ControlSystem: qubits must be >= 1");
  if (system.steps < 1) throw std::invalid_argument("ControlSystem: steps must be >= 1");
  if (!(system.total_time > 0.0)) {
    throw std::invalid_argument("ControlSystem: total_time must be positive");
  }
  const Eigen::Index d = system.dim();
  if (system.intrinsic.dim() != d) {
    throw std::invalid_argument("ControlSystem: intrinsic dimension mismatch");
  }
  for (const auto& h : system.controls) {
    if (h.dim() != d) throw std::invalid_argument("ControlSystem: control dimension mismatch");
  }
  if (system.x_init.rows() != d || system.x_init.cols() != d) {
    throw std::invalid_argument("ControlSystem: x_init dimension mismatch");
  }
  if (unitarity_error(system.x_init) > kUnitaryTol) {
    throw std::invalid_argument("ControlSystem: x_init is not unitary");
  }
}

ControlField constant_control(int controllers, int steps, double value) {
  ControlField u;
  u.values = RMatrix::Constant(controllers, steps, value);
  u.binary = (value == 0.0 || value == 1.0);
  return u;
}

void validate_control_field(const ControlField& u) {
  for (Eigen::Index j = 0; j < u.values.rows(); ++j) {
    for (Eigen::Index k = 0; k < u.values.cols(); ++k) {
      const double v = u.values(j, k);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << "ControlField: entry (" << j << "," << k << ") = " << v << " outside [0,1]";
        throw std::invalid_argument(os.str());
      }
      if (u.binary && v != 0.0 && v != 1.0) {
        std::ostringstream os;
        os << "ControlField: binary field has fractional entry (" << j << "," << k << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

TargetSpec TargetSpec::energy(HermitianOperator h_tilde, CVector psi0, double e_min) {
  if (e_min == 0.0) throw std::invalid_argument("TargetSpec: E_min must be nonzero");
  if (std::abs(psi0.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("TargetSpec: psi0 must be a unit vector");
  }
  if (psi0.size() != h_tilde.dim()) {
    throw std::invalid_argument("TargetSpec: psi0 dimension mismatch");
  }
  TargetSpec t;
  t.kind = Kind::energy;
  t.h_tilde = std::move(h_tilde);
  t.psi0 = std::move(psi0);
  t.e_min = e_min;
  return t;
}

TargetSpec TargetSpec::infidelity(CMatrix x_targ) {
  if (unitarity_error(x_targ) > kUnitaryTol) {
    throw std::invalid_argument("TargetSpec: x_targ is not unitary");
  }
  TargetSpec t;
  t.kind = Kind::infidelity;
  t.x_targ = std::move(x_targ);
  return t;
}

HermitianOperator pauli_operator(PauliAxis axis, int site, int qubits) {
  if (site < 1 || site > qubits) {
    std::ostringstream os;
    os << "pauli_operator: site " << site << " outside 1.." << qubits;
    throw std::invalid_argument(os.str());
  }
  CMatrix op = CMatrix::Identity(1, 1);
  const CMatrix sigma = pauli_matrix(axis);
  for (int i = 1; i <= qubits; ++i) {
    if (i == site) {
      op = Eigen::kroneckerProduct(op, sigma).eval();
    } else {
      op = Eigen::kroneckerProduct(op, CMatrix::Identity(2, 2)).eval();
    }
  }
  return HermitianOperator(std::move(op));
}

EigenSystem eigh(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigh: eigendecomposition failed for " << h.rows() << "x" << h.cols()
       << " matrix, |H| = " << h.norm() << ", max |H - H^dag| = " << hermiticity_error(h);
    throw std::runtime_error(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix expm_from_eigensystem(const EigenSystem& es, double dt) {
  const Eigen::Index d = es.values.size();
  CVector phases(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    phases(i) = std::exp(Complex(0.0, -es.values(i) * dt));
  }
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

CMatrix expm_unitary(const HermitianOperator& h, double dt) {
  return expm_from_eigensystem(eigh(h.matrix()), dt);
}

HermitianOperator assemble_hamiltonian(const ControlSystem& system,
                                       const RVector& u_column,
                                       const RVector& xi_column) {
  const int n = system.controller_count();
  if (u_column.size() != n) {
    throw std::invalid_argument("assemble_hamiltonian: control column length mismatch");
  }
  if (xi_column.size() != n + 1) {
    throw std::invalid_argument("assemble_hamiltonian: noise column length mismatch");
  }
  CMatrix h = (1.0 + xi_column(0)) * system.intrinsic.matrix();
  for (int j = 0; j < n; ++j) {
    h += (1.0 + xi_column(j + 1)) * u_column(j) * system.controls[j].matrix();
  }
  // Hermitian by construction: real combination of Hermitian terms.
  return HermitianOperator(std::move(h));
}

PropagationResult propagate(const ControlSystem& system, const ControlField& u,
                            const Scenario& xi) {
  const int n = system.controller_count();
  const int t = system.steps;
  if (u.controllers() != n || u.steps() != t) {
    throw std::invalid_argument("propagate: control dimensions do not match system");
  }
  if (xi.xi.rows() != n + 1 || xi.xi.cols() != t) {
    throw std::invalid_argument("propagate: scenario dimensions do not match system");
  }
  const double dt = system.dt();

  PropagationResult result;
  result.step_unitaries.reserve(t);
  result.cumulative.reserve(t + 1);
  result.eigenvalues.reserve(t);
  result.eigenvectors.reserve(t);
  result.cumulative.push_back(system.x_init);

  for (int k = 0; k < t; ++k) {
    const HermitianOperator h_k =
        assemble_hamiltonian(system, u.values.col(k), xi.xi.col(k));
    EigenSystem es = eigh(h_k.matrix());
    CMatrix u_k = expm_from_eigensystem(es, dt);
    result.cumulative.push_back(u_k * result.cumulative.back());
    result.step_unitaries.push_back(std::move(u_k));
    result.eigenvalues.push_back(std::move(es.values));
    result.eigenvectors.push_back(std::move(es.vectors));
  }
  return result;
}

double cost(const CMatrix& x_final, const TargetSpec& target) {
  if (target.kind == TargetSpec::Kind::energy) {
    if (x_final.rows() != target.psi0.size()) {
      throw std::invalid_argument("cost: operator dimension does not match target");
    }
    const CVector w = x_final * target.psi0;
    const Complex e = w.dot(target.h_tilde.matrix() * w);  // w† H~ w
    if (std::abs(e.imag()) >= 1e-9) {
      std::ostringstream os;
      os << "cost: energy expectation has imaginary residue " << e.imag();
      throw std::runtime_error(os.str());
    }
    return 1.0 - e.real() / target.e_min;
  }
  if (x_final.rows() != target.x_targ.rows()) {
    throw std::invalid_argument("cost: operator dimension does not match target");
  }
  const Complex z = (target.x_targ.adjoint() * x_final).trace();
  return 1.0 - std::abs(z) / static_cast<double>(x_final.rows());
}

namespace {

// Seed matrix L of the chain rule: d cost = Re tr(L dX_T).
CMatrix adjoint_seed(const CMatrix& x_final, const TargetSpec& target) {
  if (target.kind == TargetSpec::Kind::energy) {
    const CVector w = x_final * target.psi0;
    // -(2/E_min) |psi0><psi0| X† H~
    return (-2.0 / target.e_min) *
           (target.psi0 * (target.h_tilde.matrix() * w).adjoint());
  }
  const Complex z = (target.x_targ.adjoint() * x_final).trace();
  const double mag = std::abs(z);
  if (mag < kTracePhaseTol) {
    return CMatrix::Zero(x_final.rows(), x_final.cols());
  }
  const double scale = -1.0 / static_cast<double>(x_final.rows());
  return scale * (std::conj(z) / mag) * target.x_targ.adjoint();
}

// Divided-difference kernel of exp(-i lambda dt) on the step spectrum.
CMatrix exp_divided_difference(const RVector& lambda, double dt) {
  const Eigen::Index d = lambda.size();
  CVector phases(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    phases(i) = std::exp(Complex(0.0, -lambda(i) * dt));
  }
  CMatrix kernel(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const double gap = lambda(a) - lambda(b);
      if (std::abs(gap) < kDegenerateTol) {
        kernel(a, b) = Complex(0.0, -dt) * phases(a);
      } else {
        kernel(a, b) = (phases(a) - phases(b)) / gap;
      }
    }
  }
  return kernel;
}

}  // namespace

RMatrix scenario_gradient(const ControlSystem& system, const ControlField& u,
                          const Scenario& xi, const TargetSpec& target,
                          const PropagationResult& prop) {
  const int n = system.controller_count();
  const int t = system.steps;
  if (static_cast<int>(prop.step_unitaries.size()) != t) {
    throw std::invalid_argument("scenario_gradient: propagation does not match system");
  }
  if (u.controllers() != n || u.steps() != t) {
    throw std::invalid_argument("scenario_gradient: control dimensions do not match system");
  }
  const double dt = system.dt();
  const Eigen::Index d = system.dim();

  const CMatrix seed = adjoint_seed(prop.final_operator(), target);
  RMatrix grad = RMatrix::Zero(n, t);
  if (seed.isZero(0.0)) return grad;

  // X_T = Q_k U_k P_{k-1}; walk k = T..1 keeping Q as a running suffix.
  CMatrix suffix = CMatrix::Identity(d, d);
  for (int k = t - 1; k >= 0; --k) {
    const CMatrix a = prop.cumulative[k] * seed * suffix;
    const CMatrix& vecs = prop.eigenvectors[k];
    const CMatrix c = vecs.adjoint() * a * vecs;
    const CMatrix kernel = exp_divided_difference(prop.eigenvalues[k], dt);
    for (int j = 0; j < n; ++j) {
      if (system.controls[j].is_zero()) continue;
      const CMatrix g = vecs.adjoint() * system.controls[j].matrix() * vecs;
      const double scale = 1.0 + xi.xi(j + 1, k);
      grad(j, k) =
          scale * c.transpose().cwiseProduct(kernel.cwiseProduct(g)).sum().real();
    }
    suffix = (suffix * prop.step_unitaries[k]).eval();
  }
  return grad;
}

}  // namespace qoc
