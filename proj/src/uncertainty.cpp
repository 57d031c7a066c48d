#include "qoc/uncertainty.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qoc/rng.hpp"

namespace qoc {

NoiseModel NoiseModel::from_offset(RVector sigma_offset, double time_offset_ratio) {
  NoiseModel m;
  m.sigma_offset = std::move(sigma_offset);
  m.time_offset_ratio = time_offset_ratio;
  m.sigma_time = m.time_offset_ratio * m.sigma_offset;
  validate_noise_model(m);
  return m;
}

void validate_noise_model(const NoiseModel& model) {
  if (model.sigma_offset.size() == 0) {
    throw std::invalid_argument("NoiseModel: sigma_offset is empty");
  }
  if (model.sigma_time.size() != model.sigma_offset.size()) {
    throw std::invalid_argument("NoiseModel: sigma_time length mismatch");
  }
  if ((model.sigma_offset.array() < 0.0).any() || (model.sigma_time.array() < 0.0).any()) {
    throw std::invalid_argument("NoiseModel: sigma entries must be non-negative");
  }
}

namespace {

// Counter layout within a scenario stream: draws 0..N are the offsets
// mu_j, draw N+1 + j*T + k is xi_{jk}. fixed_offset_scenarios skips the
// offset draws but keeps the same xi counters, so the fluctuation pattern
// of a given (seed, scenario) is identical in both modes.
Scenario draw_scenario(const NoiseModel& model, int steps, std::uint64_t seed,
                       int scenario_index, const RVector* pinned_offsets,
                       double probability) {
  const int m = model.hamiltonian_count();
  rng::CounterRng stream(seed, static_cast<std::uint64_t>(scenario_index));

  Scenario s;
  s.probability = probability;
  s.offsets = RVector(m);
  for (int j = 0; j < m; ++j) {
    const double draw = stream.normal01();
    s.offsets(j) =
        pinned_offsets != nullptr ? (*pinned_offsets)(j) : model.sigma_offset(j) * draw;
  }
  s.xi = RMatrix(m, steps);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < steps; ++k) {
      s.xi(j, k) = s.offsets(j) + model.sigma_time(j) * stream.normal01();
    }
  }
  return s;
}

ScenarioSet make_set(const NoiseModel& model, int count, int steps, std::uint64_t seed,
                     const RVector* pinned_offsets) {
  validate_noise_model(model);
  if (count < 1) throw std::invalid_argument("sample_scenarios: count must be >= 1");
  if (steps < 1) throw std::invalid_argument("sample_scenarios: steps must be >= 1");
  if (pinned_offsets != nullptr && pinned_offsets->size() != model.hamiltonian_count()) {
    throw std::invalid_argument("fixed_offset_scenarios: offsets length mismatch");
  }
  ScenarioSet set;
  set.seed = seed;
  set.model = model;
  set.scenarios.reserve(count);
  const double p = 1.0 / count;
  for (int s = 0; s < count; ++s) {
    set.scenarios.push_back(draw_scenario(model, steps, seed, s, pinned_offsets, p));
  }
  return set;
}

}  // namespace

ScenarioSet sample_scenarios(const NoiseModel& model, int count, int steps,
                             std::uint64_t seed) {
  return make_set(model, count, steps, seed, nullptr);
}

ScenarioSet fixed_offset_scenarios(const NoiseModel& model, const RVector& offsets,
                                   int count, int steps, std::uint64_t seed) {
  return make_set(model, count, steps, seed, &offsets);
}

ScenarioSet zero_noise(int hamiltonians, int steps) {
  NoiseModel model;
  model.sigma_offset = RVector::Zero(hamiltonians);
  model.sigma_time = RVector::Zero(hamiltonians);
  return sample_scenarios(model, 1, steps, 0);
}

nlohmann::json scenario_set_to_json(const ScenarioSet& set) {
  nlohmann::json scenarios = nlohmann::json::array();
  for (const auto& s : set.scenarios) {
    nlohmann::json xi = nlohmann::json::array();
    for (Eigen::Index j = 0; j < s.xi.rows(); ++j) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < s.xi.cols(); ++k) row.push_back(s.xi(j, k));
      xi.push_back(std::move(row));
    }
    scenarios.push_back({{"offsets", std::vector<double>(s.offsets.begin(), s.offsets.end())},
                         {"probability", s.probability},
                         {"xi", std::move(xi)}});
  }
  return nlohmann::json{
      {"seed", set.seed},
      {"model",
       {{"sigma_offset",
         std::vector<double>(set.model.sigma_offset.begin(), set.model.sigma_offset.end())},
        {"sigma_time",
         std::vector<double>(set.model.sigma_time.begin(), set.model.sigma_time.end())},
        {"time_offset_ratio", set.model.time_offset_ratio}}},
      {"scenarios", std::move(scenarios)}};
}

ScenarioSet scenario_set_from_json(const nlohmann::json& j) {
  ScenarioSet set;
  set.seed = j.at("seed").get<std::uint64_t>();
  const auto& jm = j.at("model");
  const auto so = jm.at("sigma_offset").get<std::vector<double>>();
  const auto st = jm.at("sigma_time").get<std::vector<double>>();
  set.model.sigma_offset = Eigen::Map<const RVector>(so.data(), so.size());
  set.model.sigma_time = Eigen::Map<const RVector>(st.data(), st.size());
  set.model.time_offset_ratio = jm.at("time_offset_ratio").get<double>();
  for (const auto& js : j.at("scenarios")) {
    Scenario s;
    const auto offs = js.at("offsets").get<std::vector<double>>();
    s.offsets = Eigen::Map<const RVector>(offs.data(), offs.size());
    s.probability = js.at("probability").get<double>();
    const auto& xi = js.at("xi");
    const Eigen::Index rows = xi.size();
    const Eigen::Index cols = rows > 0 ? xi.at(0).size() : 0;
    s.xi = RMatrix(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto row = xi.at(r).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != cols) {
        throw std::invalid_argument("scenario_set_from_json: ragged xi rows");
      }
      for (Eigen::Index c = 0; c < cols; ++c) s.xi(r, c) = row[c];
    }
    set.scenarios.push_back(std::move(s));
  }
  return set;
}

}  // namespace qoc
