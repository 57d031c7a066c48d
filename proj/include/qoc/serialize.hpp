#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qoc/evaluation.hpp"
#include "qoc/optimizers.hpp"
#include "qoc/stochastic_objective.hpp"
#include "qoc/system.hpp"

namespace qoc::io {

/// Provenance stamped into every output file.
struct Meta {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// FNV-1a hash (hex) of the canonical (sorted-key) config serialization.
std::string config_hash(const nlohmann::json& config);

/// 17-significant-digit decimal rendering.
std::string format_double(double v);

/// CSV files use RFC-4180 CRLF framing. The first record is a single
/// comment field carrying the meta block, the second the column header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const Meta& meta, const std::string& header);
  ~CsvWriter();
  void row(const std::vector<std::string>& fields);

 private:
  struct Impl;
  Impl* impl_;
};

void write_control_json(const std::string& path, const Meta& meta, const ControlField& u);
ControlField read_control_json(const std::string& path);

void write_trace_csv(const std::string& path, const Meta& meta, const SolveTrace& trace);

void write_breakdown_json(const std::string& path, const Meta& meta,
                          const ObjectiveBreakdown& breakdown);

/// step,controller,value rows over the full fine grid.
void write_schedule_csv(const std::string& path, const Meta& meta, const ControlField& u_bin);

/// Compact schedule for the evaluator: the active controller per step
/// (sos1 output), or the full 0/1 matrix otherwise.
void write_schedule_json(const std::string& path, const Meta& meta, const ControlField& u_bin);

void write_deviation_json(const std::string& path, const Meta& meta, double deviation,
                          double bound, bool pass);

void write_report_json(const std::string& path, const Meta& meta,
                       const EvaluationReport& report);
void write_report_csv(const std::string& path, const Meta& meta,
                      const EvaluationReport& report);

void write_sweep_csv(const std::string& path, const Meta& meta, const SweepGrid& grid);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace qoc::io
