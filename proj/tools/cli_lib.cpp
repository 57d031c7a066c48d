#include "cli_lib.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qoc/evaluation.hpp"
#include "qoc/instances.hpp"
#include "qoc/pipeline.hpp"
#include "qoc/quantum_core.hpp"
#include "qoc/rng.hpp"
#include "qoc/rounding.hpp"
#include "qoc/serialize.hpp"

namespace qoc::cli {

namespace {

namespace fs = std::filesystem;

nlohmann::json require(const nlohmann::json& config, const char* key) {
  if (!config.contains(key)) {
    throw ConfigError(std::string("config: missing section '") + key + "'");
  }
  return config.at(key);
}

std::uint64_t master_seed(const nlohmann::json& config) {
  if (!config.contains("seed")) throw ConfigError("config: missing 'seed'");
  return config.at("seed").get<std::uint64_t>();
}

BuiltInstance instance_from(const nlohmann::json& config, const Paths& paths) {
  try {
    return build_instance(require(config, "instance"), paths.base_dir);
  } catch (const std::runtime_error& e) {
    // Missing or unreadable referenced files are configuration problems.
    throw ConfigError(e.what());
  }
}

NoiseModel noise_from(const nlohmann::json& config, int controllers) {
  const nlohmann::json spec = require(config, "noise");
  const int m = controllers + 1;
  NoiseModel model;
  const auto& so = spec.at("sigma_offset");
  if (so.is_number()) {
    model.sigma_offset = RVector::Zero(m);
    for (int j = 1; j < m; ++j) model.sigma_offset(j) = so.get<double>();
  } else {
    const auto vec = so.get<std::vector<double>>();
    if (static_cast<int>(vec.size()) != m) {
      throw ConfigError("noise.sigma_offset must have one entry per Hamiltonian (" +
                        std::to_string(m) + ")");
    }
    model.sigma_offset = Eigen::Map<const RVector>(vec.data(), vec.size());
  }
  model.time_offset_ratio = spec.value("time_offset_ratio", 0.1);
  if (spec.contains("sigma_time")) {
    const auto vec = spec.at("sigma_time").get<std::vector<double>>();
    if (static_cast<int>(vec.size()) != m) {
      throw ConfigError("noise.sigma_time must have one entry per Hamiltonian");
    }
    model.sigma_time = Eigen::Map<const RVector>(vec.data(), vec.size());
  } else {
    model.sigma_time = model.time_offset_ratio * model.sigma_offset;
  }
  try {
    validate_noise_model(model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return model;
}

RiskSpec risk_from(const nlohmann::json& config) {
  const nlohmann::json spec = require(config, "risk");
  RiskSpec risk;
  risk.alpha = spec.value("alpha", 0.5);
  risk.eta = spec.value("eta", 0.05);
  risk.theta = spec.value("theta", 0.0);
  try {
    validate_risk_spec(risk);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return risk;
}

SolverSpec solver_from(const nlohmann::json& config) {
  const nlohmann::json spec = require(config, "solver");
  SolverSpec out;
  const std::string method = spec.value("method", std::string("qn"));
  if (method == "adam") {
    out.kind = SolverKind::adam;
  } else if (method == "qn") {
    out.kind = SolverKind::quasi_newton;
  } else {
    throw ConfigError("solver.method must be 'adam' or 'qn'");
  }
  out.scenario_count = spec.value("scenarios", 1);
  if (out.scenario_count < 1) throw ConfigError("solver.scenarios must be >= 1");
  out.init = spec.value("init", std::string("uniform"));

  out.adam.max_iter = spec.value("max_iter", out.adam.max_iter);
  out.adam.gamma1 = spec.value("gamma1", out.adam.gamma1);
  out.adam.gamma2 = spec.value("gamma2", out.adam.gamma2);
  out.adam.f_bar = spec.value("f_bar", out.adam.f_bar);
  out.adam.beta1 = spec.value("beta1", out.adam.beta1);
  out.adam.beta2 = spec.value("beta2", out.adam.beta2);
  out.adam.epsilon = spec.value("epsilon", out.adam.epsilon);
  out.adam.resample = spec.value("resample", out.adam.resample);

  out.qn.max_iter = spec.value("max_iter", out.qn.max_iter);
  out.qn.memory = spec.value("memory", out.qn.memory);
  out.qn.grad_tol = spec.value("grad_tol", out.qn.grad_tol);
  out.qn.f_tol = spec.value("f_tol", out.qn.f_tol);
  out.qn.max_line_search = spec.value("max_line_search", out.qn.max_line_search);
  return out;
}

RoundingConfig rounding_from(const nlohmann::json& config) {
  const nlohmann::json spec = require(config, "rounding");
  RoundingConfig cfg;
  cfg.c_sur = spec.value("c_sur", 1);
  if (cfg.c_sur < 1) throw ConfigError("rounding.c_sur must be >= 1");
  const std::string mode = spec.value("mode", std::string("sos1"));
  if (mode == "sos1") {
    cfg.mode = RoundingConfig::Mode::sos1;
  } else if (mode == "free") {
    cfg.mode = RoundingConfig::Mode::free;
  } else {
    throw ConfigError("rounding.mode must be 'sos1' or 'free'");
  }
  return cfg;
}

io::Meta meta_from(const nlohmann::json& config) {
  return {io::config_hash(config), master_seed(config)};
}

std::string out_path(const Paths& paths, const std::string& name) {
  fs::create_directories(paths.out_dir);
  return (fs::path(paths.out_dir) / name).string();
}

ControlField read_any_control(const std::string& path) {
  const nlohmann::json j = io::read_json_file(path);
  if (j.contains("active_controller")) {
    const int n = j.at("controllers").get<int>();
    const auto active = j.at("active_controller").get<std::vector<int>>();
    ControlField u;
    u.binary = true;
    u.values = RMatrix::Zero(n, static_cast<int>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const int controller = active[k];
      if (controller < 1 || controller > n) {
        throw ConfigError("schedule refers to controller " + std::to_string(controller));
      }
      u.values(controller - 1, static_cast<int>(k)) = 1.0;
    }
    return u;
  }
  return io::read_control_json(path);
}

/// The control may live on the instance grid or a c_sur-refined one.
ControlSystem system_for_control(const ControlSystem& base, const ControlField& u) {
  if (u.steps() == base.steps) return base;
  if (u.steps() % base.steps == 0) return base.refined(u.steps() / base.steps);
  throw ConfigError("control grid (" + std::to_string(u.steps()) +
                    " steps) is not a refinement of the instance grid (" +
                    std::to_string(base.steps) + ")");
}

}  // namespace

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " + e.what());
  }
}

void run_solve(const nlohmann::json& config, const Paths& paths) {
  const BuiltInstance inst = instance_from(config, paths);
  const NoiseModel noise = noise_from(config, inst.system.controller_count());
  const RiskSpec risk = risk_from(config);
  const SolverSpec solver = solver_from(config);
  const std::uint64_t seed = master_seed(config);
  const io::Meta meta = meta_from(config);

  const SolveTrace trace =
      run_relaxation(inst.system, inst.target, risk, noise, solver, seed);

  const ScenarioSet base =
      in_sample_scenarios(inst.system, noise, solver.scenario_count, seed);
  const ObjectiveBreakdown breakdown =
      evaluate(inst.system, trace.u_final, base, inst.target, risk);

  io::write_control_json(out_path(paths, "u_con.json"), meta, trace.u_final);
  io::write_trace_csv(out_path(paths, "trace.csv"), meta, trace);
  io::write_breakdown_json(out_path(paths, "breakdown.json"), meta, breakdown);
  std::cout << "solve: " << trace.iterations_used << " iterations, objective "
            << io::format_double(breakdown.total) << "\n";
}

void run_round(const nlohmann::json& config, const std::string& u_con_path,
               const Paths& paths) {
  const BuiltInstance inst = instance_from(config, paths);
  const RoundingConfig cfg = rounding_from(config);
  const io::Meta meta = meta_from(config);

  ControlField u_con;
  try {
    u_con = io::read_control_json(u_con_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (u_con.controllers() != inst.system.controller_count() ||
      u_con.steps() != inst.system.steps) {
    throw ConfigError("relaxed control shape does not match the instance");
  }

  const ControlField u_bin = sum_up_rounding(u_con, cfg, inst.system.dt());
  const double deviation = cumulative_deviation(u_con, u_bin, cfg, inst.system.dt());
  const double bound =
      bound_rhs(inst.system.controller_count(), cfg, inst.system.dt(),
                inst.system.total_time, penalty_sos1(u_con));
  const bool pass = cfg.mode != RoundingConfig::Mode::sos1 || deviation <= bound + 1e-12;

  io::write_schedule_csv(out_path(paths, "u_bin.csv"), meta, u_bin);
  io::write_schedule_json(out_path(paths, "u_bin.json"), meta, u_bin);
  io::write_deviation_json(out_path(paths, "deviation.json"), meta, deviation, bound, pass);
  std::cout << "round: deviation " << io::format_double(deviation) << " bound "
            << io::format_double(bound) << (pass ? " (pass)" : " (FAIL)") << "\n";
}

void run_evaluate(const nlohmann::json& config, const std::string& control_path,
                  const Paths& paths) {
  const BuiltInstance inst = instance_from(config, paths);
  const NoiseModel noise = noise_from(config, inst.system.controller_count());
  const RiskSpec risk = risk_from(config);
  const std::uint64_t seed = master_seed(config);
  const io::Meta meta = meta_from(config);

  const nlohmann::json spec = require(config, "evaluation");
  const int groups = spec.value("groups", 10);
  const int per_group = spec.value("per_group", 500);

  ControlField u;
  try {
    u = read_any_control(control_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const ControlSystem system = system_for_control(inst.system, u);

  const EvaluationReport report = out_of_sample(
      system, u, inst.target, noise, groups, per_group, risk,
      rng::derive_seed(seed, "evaluation", "out-of-sample"), inst.dp_threshold);

  io::write_report_json(out_path(paths, "report.json"), meta, report);
  io::write_report_csv(out_path(paths, "report.csv"), meta, report);
  std::cout << "evaluate: mean " << io::format_double(report.pooled_mean) << " cvar "
            << io::format_double(report.pooled_cvar) << " total "
            << io::format_double(report.total) << "\n";
}

void run_sweep(const nlohmann::json& config, const std::string& control_path,
               const Paths& paths) {
  const BuiltInstance inst = instance_from(config, paths);
  const NoiseModel noise = noise_from(config, inst.system.controller_count());
  const std::uint64_t seed = master_seed(config);
  const io::Meta meta = meta_from(config);

  const nlohmann::json spec = require(config, "sweep");
  const double lo = spec.value("mu_lo", -0.5);
  const double hi = spec.value("mu_hi", 0.5);
  const int grid_points = spec.value("grid_points", 21);
  const int per_cell = spec.value("per_cell", 20);

  ControlField u;
  try {
    u = read_any_control(control_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const ControlSystem system = system_for_control(inst.system, u);

  const SweepGrid grid =
      offset_sweep(system, u, inst.target, noise, {lo, hi}, grid_points, per_cell,
                   rng::derive_seed(seed, "evaluation", "sweep"));
  io::write_sweep_csv(out_path(paths, "sweep.csv"), meta, grid);
  std::cout << "sweep: " << grid_points * grid_points << " cells\n";
}

void run_instance_build(const nlohmann::json& config, const Paths& paths) {
  const BuiltInstance inst = instance_from(config, paths);
  const io::Meta meta = meta_from(config);
  nlohmann::json j = instance_config_to_json(inst);
  j["meta"] = {{"config_hash", meta.config_hash}, {"seed", meta.seed}};
  if (inst.kind == "counterexample") {
    save_matrix(inst.target.x_targ, out_path(paths, "x_targ.json"));
    j["x_targ_file"] = "x_targ.json";
  }
  io::write_json_file(out_path(paths, "instance.json"), j);
  std::cout << "instance: kind " << inst.kind << ", "
            << inst.system.controller_count() << " controllers, dim "
            << inst.system.dim() << "\n";
}

namespace {

// Independent re-derivations used by verify. These deliberately avoid the
// library's own closed forms.

double verify_breakpoint_cvar(const std::vector<double>& values,
                              const std::vector<double>& probs, double eta) {
  double best = 1e300;
  for (double zeta : values) {
    double acc = zeta;
    for (std::size_t s = 0; s < values.size(); ++s) {
      acc += probs[s] * std::max(0.0, values[s] - zeta) / eta;
    }
    best = std::min(best, acc);
  }
  return best;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

}  // namespace

int run_verify(std::uint64_t seed) {
  std::vector<Check> checks;

  {  // CVaR closed form against breakpoint enumeration.
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      rng::CounterRng gen(rng::derive_seed(seed, "verify", "cvar"), trial);
      const int s = 1 + static_cast<int>(gen.next_u64() % 12);
      std::vector<double> values(s), probs(s);
      double total = 0.0;
      for (int i = 0; i < s; ++i) {
        values[i] = gen.uniform01();
        probs[i] = gen.uniform(0.05, 1.0);
        total += probs[i];
      }
      for (double& p : probs) p /= total;
      const double eta = gen.uniform(0.02, 1.0);
      worst = std::max(worst, std::abs(cvar_closed_form(values, probs, eta) -
                                       verify_breakpoint_cvar(values, probs, eta)));
    }
    checks.push_back({"cvar_closed_form == breakpoint minimization", worst <= 1e-12,
                      "max |diff| = " + io::format_double(worst)});
  }

  {  // Analytic gradient against central differences.
    const EnergyInstance inst = build_energy_instance(2, seed, 1.5, 6);
    const NoiseModel noise =
        NoiseModel::from_offset((RVector(3) << 0.0, 0.05, 0.05).finished());
    const ScenarioSet scenarios =
        sample_scenarios(noise, 3, 6, rng::derive_seed(seed, "verify", "grad"));
    const RiskSpec risk{0.5, 0.4, 0.7};
    ControlField u = constant_control(2, 6, 0.5);
    rng::CounterRng gen(rng::derive_seed(seed, "verify", "grad-u"), 0);
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 6; ++k) u.values(j, k) = 0.2 + 0.6 * gen.uniform01();
    }
    const auto [g, tie] = gradient(inst.system, u, scenarios, inst.target, risk);
    double worst = 0.0;
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 6; ++k) {
        ControlField up = u, dn = u;
        up.values(j, k) += h;
        dn.values(j, k) -= h;
        const double fd = (evaluate(inst.system, up, scenarios, inst.target, risk).total -
                           evaluate(inst.system, dn, scenarios, inst.target, risk).total) /
                          (2 * h);
        worst = std::max(worst, std::abs(g(j, k) - fd) / std::max(1.0, std::abs(fd)));
      }
    }
    checks.push_back({"objective gradient == central differences",
                      !tie && worst <= 1e-5, "max rel err = " + io::format_double(worst)});
  }

  {  // Rounding deviation bound.
    bool ok = true;
    double worst_margin = 1e300;
    for (int trial = 0; trial < 200; ++trial) {
      rng::CounterRng gen(rng::derive_seed(seed, "verify", "sur"), trial);
      const int n = 2 + static_cast<int>(gen.next_u64() % 4);
      const int t = 5 + static_cast<int>(gen.next_u64() % 20);
      const int c_sur = 1 << (gen.next_u64() % 4);
      ControlField u;
      u.values = RMatrix(n, t);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < t; ++k) u.values(j, k) = gen.uniform01();
      }
      const double dt = 0.2;
      const RoundingConfig cfg{c_sur, RoundingConfig::Mode::sos1};
      const ControlField u_bin = sum_up_rounding(u, cfg, dt);
      const double deviation = cumulative_deviation(u, u_bin, cfg, dt);
      const double bound = bound_rhs(n, cfg, dt, dt * t, penalty_sos1(u));
      ok = ok && deviation <= bound + 1e-12;
      worst_margin = std::min(worst_margin, bound - deviation);
      for (int k = 0; k < u_bin.steps(); ++k) {
        ok = ok && u_bin.values.col(k).sum() == 1.0;
      }
    }
    checks.push_back({"sum-up rounding respects the deviation bound", ok,
                      "min margin = " + io::format_double(worst_margin)});
  }

  {  // Unitarity and infidelity cost bounds on random propagations.
    bool ok = true;
    double worst_unitarity = 0.0;
    auto [sys, target] = build_counterexample();
    const NoiseModel noise = NoiseModel::from_offset(RVector::Constant(3, 0.05));
    for (int trial = 0; trial < 20; ++trial) {
      rng::CounterRng gen(rng::derive_seed(seed, "verify", "unitary"), trial);
      ControlSystem fine = sys.refined(10);
      ControlField u;
      u.values = RMatrix(2, fine.steps);
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < fine.steps; ++k) u.values(j, k) = gen.uniform01();
      }
      const ScenarioSet scenarios = sample_scenarios(noise, 1, fine.steps, seed + trial);
      const PropagationResult prop = propagate(fine, u, scenarios.scenarios[0]);
      for (const auto& x : prop.cumulative) {
        worst_unitarity = std::max(worst_unitarity, unitarity_error(x));
      }
      const double f = cost(prop.final_operator(), target);
      ok = ok && f >= 0.0 && f <= 1.0 + 1e-12;
    }
    checks.push_back({"propagation unitarity and cost bounds",
                      ok && worst_unitarity <= 1e-10,
                      "max ||X'X - I|| = " + io::format_double(worst_unitarity)});
  }

  {  // Sampling determinism.
    const NoiseModel noise = NoiseModel::from_offset(RVector::Constant(4, 0.07));
    const ScenarioSet a = sample_scenarios(noise, 10, 12, seed);
    const ScenarioSet b = sample_scenarios(noise, 10, 12, seed);
    bool same = true;
    for (int s = 0; s < a.size(); ++s) {
      same = same && (a.scenarios[s].xi - b.scenarios[s].xi).cwiseAbs().maxCoeff() == 0.0;
    }
    checks.push_back({"scenario sampling is seed-deterministic", same, ""});
  }

  int failures = 0;
  std::printf("%-55s %s\n", "check", "result");
  for (const auto& c : checks) {
    std::printf("%-55s %s%s%s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                c.detail.empty() ? "" : "  ", c.detail.c_str());
    if (!c.pass) ++failures;
  }
  return failures;
}

}  // namespace qoc::cli
