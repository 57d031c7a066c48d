#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kBin = QCTRL_BIN;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qctrl_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const int status = std::system((kBin + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

void write_config(const fs::path& path, const nlohmann::json& extra = {}) {
  nlohmann::json config{
      {"seed", 42},
      {"instance", {{"kind", "energy"}, {"q", 2}, {"t_f", 2.0}, {"T", 10}, {"seed", 7}}},
      {"noise", {{"sigma_offset", 0.05}}},
      {"risk", {{"alpha", 0.5}, {"eta", 0.05}, {"theta", 1.0}}},
      {"solver", {{"method", "qn"}, {"scenarios", 5}, {"max_iter", 20}}},
      {"rounding", {{"c_sur", 2}, {"mode", "sos1"}}},
      {"evaluation", {{"groups", 2}, {"per_group", 20}}},
      {"sweep", {{"mu_lo", -0.5}, {"mu_hi", 0.5}, {"grid_points", 3}, {"per_cell", 2}}}};
  for (auto& [k, v] : extra.items()) config[k] = v;
  std::ofstream out(path);
  out << config.dump(2);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("solve then round then evaluate then sweep produces the expected files") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "config.json";
  write_config(cfg);
  const std::string out = (tmp.path / "out").string();

  REQUIRE(run("solve --config " + cfg.string() + " --out " + out) == 0);
  CHECK(fs::exists(out + "/u_con.json"));
  CHECK(fs::exists(out + "/trace.csv"));
  CHECK(fs::exists(out + "/breakdown.json"));

  REQUIRE(run("round --config " + cfg.string() + " --control " + out +
              "/u_con.json --out " + out) == 0);
  CHECK(fs::exists(out + "/u_bin.csv"));
  CHECK(fs::exists(out + "/u_bin.json"));
  const nlohmann::json deviation =
      nlohmann::json::parse(slurp(out + "/deviation.json"));
  CHECK(deviation.at("pass").get<bool>());
  CHECK(deviation.at("cumulative_deviation").get<double>() <=
        deviation.at("bound_rhs").get<double>());

  REQUIRE(run("evaluate --config " + cfg.string() + " --control " + out +
              "/u_bin.json --out " + out) == 0);
  const nlohmann::json report = nlohmann::json::parse(slurp(out + "/report.json"));
  CHECK(report.at("group_count").get<int>() == 2);
  CHECK(report.at("pooled_cvar").get<double>() >=
        report.at("pooled_mean").get<double>() - 1e-12);
  CHECK(report.contains("dp"));

  REQUIRE(run("sweep --config " + cfg.string() + " --control " + out +
              "/u_con.json --out " + out) == 0);
  const std::string sweep = slurp(out + "/sweep.csv");
  // meta record + header + 9 cells, CRLF framed
  int lines = 0;
  for (char c : sweep) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 11);
  CHECK(sweep.find("\r\n") != std::string::npos);
  CHECK(sweep.find("mu1,mu2,avg_cost") != std::string::npos);
}

TEST_CASE("error exits: config problems are 2") {
  TempDir tmp;

  SUBCASE("missing config file") {
    CHECK(run("solve --config " + (tmp.path / "nope.json").string() + " --out " +
              (tmp.path / "o").string()) == 2);
  }
  SUBCASE("malformed json") {
    const fs::path cfg = tmp.path / "bad.json";
    std::ofstream(cfg) << "{ not json";
    CHECK(run("solve --config " + cfg.string() + " --out " + (tmp.path / "o").string()) ==
          2);
  }
  SUBCASE("missing target file for a circuit instance") {
    const fs::path cfg = tmp.path / "config.json";
    write_config(cfg, {{"instance",
                        {{"kind", "circuit"},
                         {"q", 2},
                         {"t_f", 10.0},
                         {"T", 10},
                         {"topology", nlohmann::json::array({{1, 2}})},
                         {"x_targ_file", "missing_target.json"}}}});
    CHECK(run("solve --config " + cfg.string() + " --out " + (tmp.path / "o").string()) ==
          2);
  }
  SUBCASE("mismatched control shape") {
    const fs::path cfg = tmp.path / "config.json";
    write_config(cfg);
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run("solve --config " + cfg.string() + " --out " + out) == 0);
    write_config(cfg, {{"instance",
                        {{"kind", "energy"}, {"q", 2}, {"t_f", 2.0}, {"T", 12},
                         {"seed", 7}}}});
    CHECK(run("round --config " + cfg.string() + " --control " + out +
              "/u_con.json --out " + out) == 2);
  }
  SUBCASE("invalid risk bounds") {
    const fs::path cfg = tmp.path / "config.json";
    write_config(cfg, {{"risk", {{"alpha", 1.5}, {"eta", 0.05}, {"theta", 0.0}}}});
    CHECK(run("solve --config " + cfg.string() + " --out " + (tmp.path / "o").string()) ==
          2);
  }
}

TEST_CASE("repeated runs with one seed are byte-identical") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "config.json";
  write_config(cfg);
  const std::string a = (tmp.path / "a").string();
  const std::string b = (tmp.path / "b").string();

  REQUIRE(run("solve --config " + cfg.string() + " --out " + a) == 0);
  REQUIRE(run("solve --config " + cfg.string() + " --out " + b) == 0);
  for (const char* name : {"u_con.json", "trace.csv", "breakdown.json"}) {
    CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));
  }

  // A different seed must change the trajectory.
  REQUIRE(run("solve --config " + cfg.string() + " --seed 43 --out " +
              (tmp.path / "c").string()) == 0);
  CHECK(slurp(a + "/u_con.json") != slurp((tmp.path / "c").string() + "/u_con.json"));
}

TEST_CASE("rounding a binary SOS1 control at c_sur 1 is the identity") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "config.json";
  write_config(cfg, {{"rounding", {{"c_sur", 1}, {"mode", "sos1"}}}});
  const std::string out = (tmp.path / "out").string();
  REQUIRE(run("solve --config " + cfg.string() + " --out " + out) == 0);
  REQUIRE(run("round --config " + cfg.string() + " --control " + out +
              "/u_con.json --out " + out) == 0);
  REQUIRE(run("round --config " + cfg.string() + " --control " + out +
              "/u_con.json --out " + (tmp.path / "again").string()) == 0);
  CHECK(slurp(out + "/u_bin.csv") == slurp((tmp.path / "again").string() + "/u_bin.csv"));
}

TEST_CASE("instance build writes the definition and verify passes") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "config.json";
  write_config(cfg, {{"instance", {{"kind", "counterexample"}}}});
  const std::string out = (tmp.path / "out").string();
  REQUIRE(run("instance build --config " + cfg.string() + " --out " + out) == 0);
  const nlohmann::json inst = nlohmann::json::parse(slurp(out + "/instance.json"));
  CHECK(inst.at("kind") == "counterexample");
  CHECK(inst.at("controllers").get<int>() == 2);
  CHECK(fs::exists(out + "/x_targ.json"));

  CHECK(run("verify") == 0);
}
