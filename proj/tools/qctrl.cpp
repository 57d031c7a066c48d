#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli_lib.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "qctrl_out";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

nlohmann::json effective_config(const CommonOpts& opts) {
  nlohmann::json config = qoc::cli::load_config(opts.config_path);
  if (opts.seed_given) config["seed"] = opts.seed;
  return config;
}

std::string parent_dir(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary quantum control optimization under sampled Hamiltonian uncertainty"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string control_path;
  int csur_override = 0;
  std::string solver_override;

  const auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "run configuration (JSON)");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "master seed (overrides the config)")
        ->each([&](const std::string&) { opts.seed_given = true; });
  };

  auto* solve = app.add_subcommand("solve", "optimize the continuous relaxation");
  add_common(solve);
  solve->add_option("--solver", solver_override, "adam|qn (overrides the config)");

  auto* round = app.add_subcommand("round", "sum-up round a relaxed control");
  add_common(round);
  round->add_option("--control", control_path, "u_con.json from solve")->required();
  round->add_option("--csur", csur_override, "grid multiplier (overrides the config)");

  auto* evaluate = app.add_subcommand("evaluate", "out-of-sample evaluation");
  add_common(evaluate);
  evaluate->add_option("--control", control_path, "control file (u_bin.json or u_con.json)")
      ->required();

  auto* sweep = app.add_subcommand("sweep", "average cost over an offset grid");
  add_common(sweep);
  sweep->add_option("--control", control_path, "control file")->required();

  auto* instance = app.add_subcommand("instance", "instance tools");
  auto* build = instance->add_subcommand("build", "materialize an instance definition");
  add_common(build);

  auto* verify = app.add_subcommand("verify", "run the invariant checks");
  verify->add_option("--seed", opts.seed, "seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return qoc::cli::run_verify(opts.seed == 0 ? 20240601 : opts.seed) == 0 ? 0 : 1;
    }

    qoc::cli::Paths paths{opts.out_dir, parent_dir(opts.config_path)};
    nlohmann::json config = effective_config(opts);

    if (solve->parsed()) {
      if (!solver_override.empty()) config["solver"]["method"] = solver_override;
      qoc::cli::run_solve(config, paths);
    } else if (round->parsed()) {
      if (csur_override > 0) config["rounding"]["c_sur"] = csur_override;
      qoc::cli::run_round(config, control_path, paths);
    } else if (evaluate->parsed()) {
      qoc::cli::run_evaluate(config, control_path, paths);
    } else if (sweep->parsed()) {
      qoc::cli::run_sweep(config, control_path, paths);
    } else if (instance->parsed()) {
      if (!build->parsed()) {
        std::cerr << "instance: expected the 'build' subcommand\n";
        return 2;
      }
      qoc::cli::run_instance_build(config, paths);
    }
    return 0;
  } catch (const qoc::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
