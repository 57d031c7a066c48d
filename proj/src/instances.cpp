#include "qoc/instances.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "qoc/quantum_core.hpp"
#include "qoc/rng.hpp"

namespace qoc {

namespace {

constexpr double kDegenerateGap = 1e-9;

RMatrix sample_coupling(int qubits, std::uint64_t seed) {
  RMatrix j = RMatrix::Zero(qubits, qubits);
  if (qubits == 2) {
    j(0, 1) = j(1, 0) = 1.0;
    return j;
  }
  rng::CounterRng gen(seed, rng::fnv1a64("energy-coupling"));
  for (int a = 0; a < qubits; ++a) {
    for (int b = a + 1; b < qubits; ++b) {
      j(a, b) = j(b, a) = gen.uniform(-1.0, 1.0);
    }
  }
  return j;
}

void check_edges(int qubits, const std::vector<std::pair<int, int>>& topology) {
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : topology) {
    if (a < 1 || a > qubits || b < 1 || b > qubits || a == b) {
      std::ostringstream os;
      os << "topology: edge (" << a << "," << b << ") invalid for q=" << qubits;
      throw std::invalid_argument(os.str());
    }
    const auto key = std::minmax(a, b);
    if (!seen.insert(key).second) {
      std::ostringstream os;
      os << "topology: duplicate edge (" << a << "," << b << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

/// diag(0,1) on the given qubit, identity elsewhere.
CMatrix excited_projector(int site, int qubits) {
  const HermitianOperator z = pauli_operator(PauliAxis::z, site, qubits);
  const Eigen::Index d = Eigen::Index(1) << qubits;
  return 0.5 * (CMatrix::Identity(d, d) - z.matrix());
}

}  // namespace

EnergyInstance build_energy_instance(int qubits, std::uint64_t seed, double t_f,
                                     int steps) {
  if (qubits < 2) throw std::invalid_argument("build_energy_instance: q must be >= 2");
  const Eigen::Index d = Eigen::Index(1) << qubits;

  CMatrix h1 = CMatrix::Zero(d, d);
  for (int i = 1; i <= qubits; ++i) {
    h1 -= pauli_operator(PauliAxis::x, i, qubits).matrix();
  }

  const RMatrix coupling = sample_coupling(qubits, seed);
  CMatrix h2 = CMatrix::Zero(d, d);
  for (int a = 1; a <= qubits; ++a) {
    for (int b = 1; b <= qubits; ++b) {
      if (a == b || coupling(a - 1, b - 1) == 0.0) continue;
      h2 += coupling(a - 1, b - 1) * (pauli_operator(PauliAxis::z, a, qubits).matrix() *
                                      pauli_operator(PauliAxis::z, b, qubits).matrix());
    }
  }

  const EigenSystem es1 = eigh(h1);
  const EigenSystem es2 = eigh(h2);
  const double e_min = es2.values(0);
  if (std::abs(e_min) < kDegenerateGap) {
    throw std::invalid_argument("build_energy_instance: degenerate instance, E_min = 0");
  }
  double first_excited = e_min;
  for (Eigen::Index i = 1; i < es2.values.size(); ++i) {
    if (es2.values(i) > e_min + kDegenerateGap) {
      first_excited = es2.values(i);
      break;
    }
  }

  EnergyInstance inst;
  inst.coupling = coupling;
  inst.first_excited = first_excited;
  inst.dp_threshold = 1.0 - first_excited / e_min;

  inst.system.qubits = qubits;
  inst.system.total_time = t_f;
  inst.system.steps = steps;
  inst.system.intrinsic = HermitianOperator::zero(d);
  inst.system.controls.emplace_back(h1);
  inst.system.controls.emplace_back(h2);
  inst.system.x_init = CMatrix::Identity(d, d);
  validate_system(inst.system);

  inst.target = TargetSpec::energy(HermitianOperator(h2), es1.vectors.col(0), e_min);
  return inst;
}

CircuitInstance build_circuit_instance(int qubits,
                                       const std::vector<std::pair<int, int>>& topology,
                                       const CMatrix& x_targ, double t_f, int steps,
                                       double j_charge, double j_flux, double j_edge) {
  if (qubits < 1) throw std::invalid_argument("build_circuit_instance: q must be >= 1");
  check_edges(qubits, topology);
  const Eigen::Index d = Eigen::Index(1) << qubits;
  if (x_targ.rows() != d || x_targ.cols() != d) {
    std::ostringstream os;
    os << "build_circuit_instance: target is " << x_targ.rows() << "x" << x_targ.cols()
       << " but the system dimension is " << d;
    throw std::invalid_argument(os.str());
  }
  if (unitarity_error(x_targ) > 1e-8) {
    throw std::invalid_argument("build_circuit_instance: target operator is not unitary");
  }

  CircuitInstance inst;
  inst.topology = topology;
  inst.j_charge = j_charge;
  inst.j_flux = j_flux;
  inst.j_edge = j_edge;

  inst.system.qubits = qubits;
  inst.system.total_time = t_f;
  inst.system.steps = steps;
  inst.system.intrinsic = HermitianOperator::zero(d);
  inst.system.x_init = CMatrix::Identity(d, d);
  for (int j = 1; j <= qubits; ++j) {
    inst.system.controls.emplace_back(
        CMatrix(j_charge * pauli_operator(PauliAxis::x, j, qubits).matrix()));
    inst.system.controls.emplace_back(CMatrix(j_flux * excited_projector(j, qubits)));
  }
  for (auto [a, b] : topology) {
    inst.system.controls.emplace_back(
        CMatrix(j_edge * (pauli_operator(PauliAxis::x, a, qubits).matrix() *
                          pauli_operator(PauliAxis::x, b, qubits).matrix())));
  }
  validate_system(inst.system);

  inst.target = TargetSpec::infidelity(x_targ);
  return inst;
}

CircuitInstance build_circuit_instance_from_file(
    int qubits, const std::vector<std::pair<int, int>>& topology,
    const std::string& x_targ_file, double t_f, int steps, double j_charge,
    double j_flux, double j_edge) {
  return build_circuit_instance(qubits, topology, load_matrix(x_targ_file), t_f, steps,
                                j_charge, j_flux, j_edge);
}

std::pair<ControlSystem, TargetSpec> build_counterexample() {
  CMatrix x_targ(4, 4);
  x_targ << 1, 0, 0, 0,
            0, 1, 0, 0,
            0, 0, 0, 1,
            0, 0, 1, 0;

  CMatrix h0(4, 4);
  h0 << 1, 0, 0, 0,
        0, -1, 2, 0,
        0, 2, -1, 1,
        0, 0, 1, 1;

  CMatrix h1(4, 4);
  h1 << 0, 0, 1, 0,
        0, 0, 0, 1,
        1, 0, 0, 0,
        0, 1, 0, 0;

  const Complex i(0.0, 1.0);
  CMatrix h2(4, 4);
  h2 << 0, 0, -i, 0,
        0, 0, 0, -i,
        i, 0, 0, 0,
        0, i, 0, 0;

  ControlSystem system;
  system.qubits = 2;
  system.total_time = 8.0;
  system.steps = 1;
  system.intrinsic = HermitianOperator(h0);
  system.controls.emplace_back(h1);
  system.controls.emplace_back(h2);
  system.x_init = CMatrix::Identity(4, 4);
  validate_system(system);

  return {std::move(system), TargetSpec::infidelity(x_targ)};
}

CMatrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  rng::CounterRng gen(seed, rng::fnv1a64("random-unitary"));
  CMatrix a(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      a(r, c) = Complex(gen.normal01(), gen.normal01());
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase so the factorization is unique.
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Complex rd = r(c, c);
    const double mag = std::abs(rd);
    if (mag > 0.0) q.col(c) *= rd / mag;
  }
  return q;
}

std::vector<std::pair<int, int>> grid_topology(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid_topology: empty grid");
  std::vector<std::pair<int, int>> edges;
  const auto id = [cols](int r, int c) { return r * cols + c + 1; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return edges;
}

BuiltInstance build_instance(const nlohmann::json& spec, const std::string& base_dir) {
  const auto kind = spec.at("kind").get<std::string>();
  BuiltInstance built;
  built.kind = kind;

  if (kind == "counterexample") {
    auto [system, target] = build_counterexample();
    built.system = std::move(system);
    built.target = std::move(target);
    return built;
  }
  if (kind != "energy" && kind != "circuit") {
    throw std::invalid_argument("build_instance: unknown kind '" + kind + "'");
  }

  const int q = spec.at("q").get<int>();
  const double t_f = spec.at("t_f").get<double>();
  const int steps = spec.at("T").get<int>();

  if (kind == "energy") {
    const auto seed = spec.value("seed", std::uint64_t{0});
    EnergyInstance inst = build_energy_instance(q, seed, t_f, steps);
    built.system = std::move(inst.system);
    built.target = std::move(inst.target);
    built.dp_threshold = inst.dp_threshold;
    return built;
  }
  std::vector<std::pair<int, int>> topology;
  for (const auto& e : spec.at("topology")) {
    topology.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  double jc = kDefaultJc, jf = kDefaultJf, je = kDefaultJe;
  if (spec.contains("couplings")) {
    const auto& c = spec.at("couplings");
    jc = c.value("j_c", jc);
    jf = c.value("j_f", jf);
    je = c.value("j_e", je);
  }
  CMatrix x_targ;
  if (spec.contains("x_targ_file")) {
    std::string path = spec.at("x_targ_file").get<std::string>();
    if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
    x_targ = load_matrix(path);
  } else if (spec.value("x_targ_counterexample", false)) {
    x_targ = build_counterexample().second.x_targ;
  } else {
    throw std::invalid_argument("build_instance: circuit instance needs x_targ_file");
  }
  CircuitInstance inst = build_circuit_instance(q, topology, x_targ, t_f, steps, jc, jf, je);
  built.system = std::move(inst.system);
  built.target = std::move(inst.target);
  return built;
}

nlohmann::json instance_config_to_json(const BuiltInstance& instance) {
  nlohmann::json j{{"kind", instance.kind},
                   {"q", instance.system.qubits},
                   {"t_f", instance.system.total_time},
                   {"T", instance.system.steps},
                   {"controllers", instance.system.controller_count()}};
  if (instance.dp_threshold) j["dp_threshold"] = *instance.dp_threshold;
  return j;
}

}  // namespace qoc
