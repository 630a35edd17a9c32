#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diraclap/config.hpp"
#include "diraclap/runner.hpp"

using namespace diraclap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> violations_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

json lap_config() {
  return {{"subcommand", "lap-sweep"},
          {"n", 2},
          {"m", 0.5},
          {"V", {{"kind", "compact_smooth"}, {"coupling", 0.5}, {"width", 1.5}}},
          {"grid", {{"L", 3.0}, {"points", 12}}},
          {"sigma", 0.7},
          {"lambda_grid", {1.0, 2.0}}};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("diraclap_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("canonical json round trips") {
  const std::vector<json> configs = {
      lap_config(),
      {{"subcommand", "strichartz"},
       {"n", 2},
       {"grid", {{"L", 8.0}, {"points", 16}, {"periodic", true}}},
       {"strichartz", {{{"p", 8}, {"q", 8}, {"theta", 0.625}, {"T", 2.0}, {"massive", false}}}},
       {"kato_T", {1.0}}},
      {{"subcommand", "directed"},
       {"n", 2},
       {"V", {{"kind", "gaussian_bump"}, {"coupling", 1.0}, {"profile", "fixed"}, {"matrix", {{{1, 0}, {0, 1}}, {{0, -1}, {-1, 0}}}}}},
       {"grid", {{"L", 2.0}, {"points", 32}}},
       {"products", {{0, 0}, {0, -1}}},
       {"z_list", {1.0, 2.0}}},
      {{"subcommand", "matrices"}, {"n", 5}},
  };
  for (const auto& j : configs) {
    const RunConfig c = parse_config(j);
    const json canon = to_json(c);
    const RunConfig back = parse_config(canon);
    CAPTURE(j.dump());
    CHECK(back == c);
    CHECK(to_json(back) == canon);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
  }
}

TEST_CASE("hash changes with the configuration") {
  json a = lap_config(), b = lap_config();
  b["sigma"] = 0.8;
  CHECK(config_hash(parse_config(a)) != config_hash(parse_config(b)));
}

TEST_CASE("every violation is reported at once") {
  json j = lap_config();
  j["sigma"] = 0.4;
  j["lambda_grid"] = json::array();
  j["bogus"] = 1;
  j["n"] = 4;
  const auto v = violations_of(j);
  CHECK(v.size() >= 4);
  CHECK(mentions(v, "sigma: 0.4 violates the LAP requirement sigma > 1/2"));
  CHECK(mentions(v, "lambda_grid: must be a non-empty list"));
  CHECK(mentions(v, "bogus: unknown field"));
  CHECK(mentions(v, "n: kernel and grid numerics need n in {2, 3}"));
}

TEST_CASE("subcommand specific rules") {
  json t = {{"subcommand", "threshold"}, {"n", 3}, {"m", 1.0}, {"sigma", 0.8}, {"grid", {{"L", 3.0}, {"points", 6}}}};
  CHECK(mentions(violations_of(t), "sigma must exceed 1 when mass > 0 per threshold-suite hypothesis"));

  json l = lap_config();
  l["lambda_grid"] = {0.3};
  CHECK(mentions(violations_of(l), "must exceed m"));

  json e = {{"subcommand", "evolve"}, {"n", 2}, {"grid", {{"L", 4.0}, {"points", 12}}}, {"times", {0.0, 1.0}}};
  CHECK(mentions(violations_of(e), "needs a periodic grid"));

  json d = {{"subcommand", "directed"}, {"n", 2}, {"grid", {{"L", 4.0}, {"points", 16}}},
            {"products", {{0, 999}}}, {"z_list", {8.0}}};
  const auto dv = violations_of(d);
  CHECK(mentions(dv, "cap index 999"));
  CHECK(mentions(dv, "is not resolved"));

  json s = {{"subcommand", "strichartz"}, {"n", 2}, {"grid", {{"L", 4.0}, {"points", 16}, {"periodic", true}}},
            {"strichartz", {{{"p", 2}, {"q", 8}, {"theta", 0.625}, {"T", 3.0}, {"massive", false}}}}};
  const auto sv = violations_of(s);
  CHECK(mentions(sv, "massless admissibility p > 2 fails"));
  CHECK(mentions(sv, "exceeds L/2"));

  CHECK(mentions(violations_of({{"n", 2}}), "subcommand: missing field"));
  CHECK_THROWS_AS(parse_config(lap_config(), "evolve"), ConfigError);
}

TEST_CASE("infinite exponents are accepted as strings") {
  json s = {{"subcommand", "strichartz"}, {"n", 3}, {"m", 1.0}, {"grid", {{"L", 4.0}, {"points", 8}, {"periodic", true}}},
            {"strichartz", {{{"p", "inf"}, {"q", 2}, {"theta", 0.5}, {"T", 1.0}, {"massive", true}}}}};
  const RunConfig c = parse_config(s);
  CHECK(std::isinf(c.strichartz[0].p));
  CHECK(to_json(c)["strichartz"][0]["p"] == "inf");
}

TEST_CASE("runner writes tables and a summary inside the output directory") {
  const fs::path dir = fresh_dir("lap");
  std::ostringstream log;
  const RunReport rep = run(parse_config(lap_config()), dir.string(), log);
  REQUIRE(rep.exit_status == kExitOk);
  CHECK(fs::exists(dir / "lap.csv"));
  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["tool_version"] == kToolVersion);
  CHECK(summary["config_hash"] == config_hash(parse_config(lap_config())));
  CHECK(summary["config"] == to_json(parse_config(lap_config())));
  CHECK(!summary.contains("error"));
  const std::string csv = slurp(dir / "lap.csv");
  CHECK(csv.rfind("lambda,", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const bool listed = std::find(rep.tables.begin(), rep.tables.end(), name) != rep.tables.end();
    CHECK((listed || name == "summary.json"));
  }
  fs::remove_all(dir);
}

TEST_CASE("reruns are byte identical") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  std::ostringstream log;
  const RunConfig c = parse_config(lap_config());
  run(c, a.string(), log);
  run(c, b.string(), log);
  CHECK(slurp(a / "lap.csv") == slurp(b / "lap.csv"));
  CHECK(!slurp(a / "lap.csv").empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("validation failures exit with 2") {
  const fs::path dir = fresh_dir("bad");
  fs::create_directories(dir);
  json j = lap_config();
  j["sigma"] = 0.3;
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << j.dump();
  std::ostringstream log;
  const RunReport rep = run_file(cfg.string(), "lap-sweep", (dir / "out").string(), log);
  CHECK(rep.exit_status == kExitValidation);
  CHECK(log.str().find("violates the LAP requirement") != std::string::npos);
  CHECK(!fs::exists(dir / "out"));
  CHECK(run_file((dir / "missing.json").string(), "lap-sweep", (dir / "out").string(), log).exit_status ==
        kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("numerical failures exit with 3 and still write a summary") {
  const fs::path dir = fresh_dir("memcap");
  json j = {{"subcommand", "evolve"}, {"n", 2}, {"grid", {{"L", 4.0}, {"points", 12}, {"periodic", true}}},
            {"times", {0.0, 1.0}}};
  setenv("DIRAC_LAP_MEMCAP", "1600", 1);
  std::ostringstream log;
  const RunReport rep = run(parse_config(j), dir.string(), log);
  unsetenv("DIRAC_LAP_MEMCAP");
  CHECK(rep.exit_status == kExitNumerical);
  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["error"].get<std::string>().find("exceeds the cap") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("matrices subcommand") {
  const fs::path dir = fresh_dir("matrices");
  std::ostringstream log;
  const RunReport rep = run(parse_config({{"subcommand", "matrices"}, {"n", 3}}), dir.string(), log);
  REQUIRE(rep.exit_status == kExitOk);
  const json m = json::parse(slurp(dir / "matrices.json"));
  CHECK(m["alpha"].size() == 3);
  CHECK(m["clifford_defect"].get<double>() == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("number formatting keeps full precision") {
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
