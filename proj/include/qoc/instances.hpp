#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qoc/system.hpp"

namespace qoc {

/// Spin system with transverse-field drive H^(1) = -sum_i sigma^x_i and
/// coupling drive H^(2) = sum_{ij} J_ij sigma^z_i sigma^z_j; the goal is to
/// steer the ground state of H^(1) to the ground energy of H^(2).
struct EnergyInstance {
  ControlSystem system;
  TargetSpec target;
  RMatrix coupling;        // J, symmetric, zero diagonal
  double first_excited;    // E_1
  double dp_threshold;     // cost level at which the first excited state is reached
};

/// q >= 2. For q = 2 the couplings are fixed at 1; for q > 2 they are
/// drawn uniformly from [-1,1] (seeded, symmetric, zero diagonal).
/// Rejects degenerate instances with E_min = 0.
EnergyInstance build_energy_instance(int qubits, std::uint64_t seed, double t_f,
                                     int steps);

/// gmon-style architecture: per qubit a charge drive J_c sigma^x and a flux
/// drive J_f diag(0,1), plus one J_e sigma^x sigma^x coupler per connected
/// pair. Controllers are ordered charge(1), flux(1), ..., charge(q),
/// flux(q), then one per edge.
struct CircuitInstance {
  ControlSystem system;
  TargetSpec target;
  std::vector<std::pair<int, int>> topology;  // 1-based qubit pairs
  double j_charge;
  double j_flux;
  double j_edge;
};

constexpr double kDefaultJc = 0.2 * 3.14159265358979323846;
constexpr double kDefaultJf = 3.0 * 3.14159265358979323846;
constexpr double kDefaultJe = 0.1 * 3.14159265358979323846;

CircuitInstance build_circuit_instance(int qubits,
                                       const std::vector<std::pair<int, int>>& topology,
                                       const CMatrix& x_targ, double t_f, int steps,
                                       double j_charge = kDefaultJc,
                                       double j_flux = kDefaultJf,
                                       double j_edge = kDefaultJe);

CircuitInstance build_circuit_instance_from_file(
    int qubits, const std::vector<std::pair<int, int>>& topology,
    const std::string& x_targ_file, double t_f, int steps,
    double j_charge = kDefaultJc, double j_flux = kDefaultJf,
    double j_edge = kDefaultJe);

/// The fixed 4x4 system demonstrating that fine-grid rounding can beat the
/// coarse continuous optimum: one time step, t_f = 8, intrinsic term plus
/// an X-type and a Y-type controller, permutation target.
std::pair<ControlSystem, TargetSpec> build_counterexample();

/// Haar-ish random unitary from the QR factorization of a complex Gaussian
/// matrix (phase-fixed R diagonal). For tests and generated targets.
CMatrix random_unitary(Eigen::Index dim, std::uint64_t seed);

/// Edges between horizontal/vertical nearest neighbors of qubits laid out
/// row-major on a rows x cols grid. 1-based.
std::vector<std::pair<int, int>> grid_topology(int rows, int cols);

/// One instance of any kind, as the CLI consumes it.
struct BuiltInstance {
  std::string kind;  // "energy" | "circuit" | "counterexample"
  ControlSystem system;
  TargetSpec target;
  std::optional<double> dp_threshold;
};

/// Builds from the instance section of a run configuration:
///   {"kind":"energy","q":2,"t_f":3.0,"T":30,"seed":7}
///   {"kind":"circuit","q":2,"t_f":20.0,"T":50,"topology":[[1,2]],
///    "x_targ_file":"target.json","couplings":{"j_c":...,"j_f":...,"j_e":...}}
///   {"kind":"counterexample"}
/// Relative target paths resolve against base_dir.
BuiltInstance build_instance(const nlohmann::json& spec, const std::string& base_dir = ".");

nlohmann::json instance_config_to_json(const BuiltInstance& instance);

}  // namespace qoc
