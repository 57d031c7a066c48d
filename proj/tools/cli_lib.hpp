#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace qoc::cli {

/// Configuration problems exit with code 2, numerical failures with 3.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Paths {
  std::string out_dir;
  std::string base_dir = ".";  // resolves relative file references in the config
};

nlohmann::json load_config(const std::string& path);

/// solve: build instance, sample in-sample scenarios, run the configured
/// solver; writes u_con.json, trace.csv, breakdown.json.
void run_solve(const nlohmann::json& config, const Paths& paths);

/// round: sum-up rounding of a relaxed control; writes u_bin.csv,
/// u_bin.json and deviation.json (deviation, bound, pass flag).
void run_round(const nlohmann::json& config, const std::string& u_con_path,
               const Paths& paths);

/// evaluate: out-of-sample report for a (binary or relaxed) control;
/// writes report.json and report.csv.
void run_evaluate(const nlohmann::json& config, const std::string& control_path,
                  const Paths& paths);

/// sweep: average cost over an offset grid; writes sweep.csv.
void run_sweep(const nlohmann::json& config, const std::string& control_path,
               const Paths& paths);

/// instance build: writes instance.json (and the counterexample target
/// matrix when applicable).
void run_instance_build(const nlohmann::json& config, const Paths& paths);

/// verify: re-derives invariants through independent routes and prints one
/// row per check. Returns the number of failed checks.
int run_verify(std::uint64_t seed);

}  // namespace qoc::cli
