#include "qoc/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qoc/rng.hpp"

namespace qoc::io {

std::string config_hash(const nlohmann::json& config) {
  const std::uint64_t h = rng::fnv1a64(config.dump());
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

nlohmann::json meta_json(const Meta& meta) {
  return nlohmann::json{{"config_hash", meta.config_hash}, {"seed", meta.seed}};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

}  // namespace

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const Meta& meta, const std::string& header)
    : impl_(new Impl{open_out(path)}) {
  impl_->out << "# config_hash=" << meta.config_hash << " seed=" << meta.seed << "\r\n";
  impl_->out << header << "\r\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) impl_->out << ',';
    impl_->out << fields[i];
  }
  impl_->out << "\r\n";
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_control_json(const std::string& path, const Meta& meta, const ControlField& u) {
  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index j = 0; j < u.values.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < u.values.cols(); ++k) row.push_back(u.values(j, k));
    values.push_back(std::move(row));
  }
  write_json_file(path, nlohmann::json{{"meta", meta_json(meta)},
                                       {"controllers", u.controllers()},
                                       {"steps", u.steps()},
                                       {"binary", u.binary},
                                       {"values", std::move(values)}});
}

ControlField read_control_json(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  ControlField u;
  u.binary = j.at("binary").get<bool>();
  const int n = j.at("controllers").get<int>();
  const int t = j.at("steps").get<int>();
  u.values = RMatrix(n, t);
  const auto& values = j.at("values");
  if (static_cast<int>(values.size()) != n) {
    throw std::invalid_argument("read_control_json: controller count mismatch");
  }
  for (int r = 0; r < n; ++r) {
    const auto row = values.at(r).get<std::vector<double>>();
    if (static_cast<int>(row.size()) != t) {
      throw std::invalid_argument("read_control_json: step count mismatch");
    }
    for (int c = 0; c < t; ++c) u.values(r, c) = row[c];
  }
  validate_control_field(u);
  return u;
}

void write_trace_csv(const std::string& path, const Meta& meta, const SolveTrace& trace) {
  CsvWriter csv(path, meta, "iter,objective,grad_norm");
  for (std::size_t i = 0; i < trace.objective_history.size(); ++i) {
    const double gn =
        i < trace.gradient_norm_history.size() ? trace.gradient_norm_history[i] : 0.0;
    csv.row({std::to_string(i + 1), format_double(trace.objective_history[i]),
             format_double(gn)});
  }
}

void write_breakdown_json(const std::string& path, const Meta& meta,
                          const ObjectiveBreakdown& breakdown) {
  nlohmann::json j = breakdown_to_json(breakdown);
  j["meta"] = meta_json(meta);
  write_json_file(path, j);
}

void write_schedule_csv(const std::string& path, const Meta& meta,
                        const ControlField& u_bin) {
  CsvWriter csv(path, meta, "step,controller,value");
  for (int k = 0; k < u_bin.steps(); ++k) {
    for (int j = 0; j < u_bin.controllers(); ++j) {
      csv.row({std::to_string(k + 1), std::to_string(j + 1),
               std::to_string(static_cast<int>(u_bin.values(j, k)))});
    }
  }
}

void write_schedule_json(const std::string& path, const Meta& meta,
                         const ControlField& u_bin) {
  // SOS1 schedules compress to the active controller per step.
  bool sos1 = true;
  std::vector<int> active(u_bin.steps(), 0);
  for (int k = 0; k < u_bin.steps() && sos1; ++k) {
    int count = 0;
    for (int j = 0; j < u_bin.controllers(); ++j) {
      if (u_bin.values(j, k) == 1.0) {
        active[k] = j + 1;
        ++count;
      }
    }
    sos1 = (count == 1);
  }
  nlohmann::json j{{"meta", meta_json(meta)},
                   {"controllers", u_bin.controllers()},
                   {"steps", u_bin.steps()}};
  if (sos1) {
    j["active_controller"] = active;
  } else {
    nlohmann::json values = nlohmann::json::array();
    for (int r = 0; r < u_bin.controllers(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < u_bin.steps(); ++c) {
        row.push_back(static_cast<int>(u_bin.values(r, c)));
      }
      values.push_back(std::move(row));
    }
    j["values"] = std::move(values);
  }
  write_json_file(path, j);
}

void write_deviation_json(const std::string& path, const Meta& meta, double deviation,
                          double bound, bool pass) {
  write_json_file(path, nlohmann::json{{"meta", meta_json(meta)},
                                       {"cumulative_deviation", deviation},
                                       {"bound_rhs", bound},
                                       {"pass", pass}});
}

void write_report_json(const std::string& path, const Meta& meta,
                       const EvaluationReport& report) {
  nlohmann::json j = report_to_json(report);
  j["meta"] = meta_json(meta);
  write_json_file(path, j);
}

void write_report_csv(const std::string& path, const Meta& meta,
                      const EvaluationReport& report) {
  CsvWriter csv(path, meta, "group,mean,sd");
  for (int g = 0; g < report.group_count; ++g) {
    csv.row({std::to_string(g + 1), format_double(report.group_means[g]),
             format_double(report.group_sds[g])});
  }
}

void write_sweep_csv(const std::string& path, const Meta& meta, const SweepGrid& grid) {
  CsvWriter csv(path, meta, "mu1,mu2,avg_cost");
  for (std::size_t i = 0; i < grid.mu1_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.mu2_axis.size(); ++j) {
      csv.row({format_double(grid.mu1_axis[i]), format_double(grid.mu2_axis[j]),
               format_double(grid.cells(i, j))});
    }
  }
}

}  // namespace qoc::io
