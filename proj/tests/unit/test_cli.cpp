#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gascert/cli.hpp"

using namespace gascert;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
  Json error() const { return Json::parse(err); }
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gascert");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("gascert_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::size_t data_lines(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(f, line)) ++n;
  return n == 0 ? 0 : n - 1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("analyze decdec at b=1.5") {
  const Run r = cli({"analyze", "--map", "decdec", "--param", "b=1.5"});
  REQUIRE(r.code == 0);
  const Json j = r.json();
  CHECK(j["command"] == "analyze");
  CHECK(j["verdict"] == "GAS-certified(grid)");
  CHECK(j["certificate"]["route"] == "Th-MT1");
  CHECK(j["embedding"]["verdict"] == "Inconclusive");
  CHECK(j["embedding"]["failing_clause"] == "pseudo-fixed points exist");
  CHECK(j["basin"]["fraction"] == 1.0);
}

TEST_CASE("analyze exit codes") {
  const Run u = cli({"analyze", "--map", "ricker-delay", "--param", "b=2", "--n", "0"});
  CHECK(u.code == 0);
  CHECK(u.json()["verdict"] == "Unstable");

  const Run bad = cli({"analyze", "--map", "nonexistent"});
  CHECK(bad.code == 1);
  CHECK(bad.out.empty());
  CHECK(bad.error()["error"].get<std::string>().find("nonexistent") != std::string::npos);
  CHECK_FALSE(bad.error()["hint"].get<std::string>().empty());

  CHECK(cli({"analyze", "--map", "decdec", "--param", "b"}).code == 1);
  CHECK(cli({"analyze", "--map", "decdec", "--param", "b=x"}).code == 1);
  CHECK(cli({"analyze", "--map", "decdec", "--param", "q=1"}).code == 1);
  CHECK(cli({"analyze", "--map", "decdec", "--bogus"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"analyze"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("regions writes three CSV files") {
  const fs::path d = scratch("regions");
  const std::string prefix = (d / "du").string();
  const Run r = cli({"regions", "--map", "down-up-a", "--param", "a=3", "--n", "256", "--out", prefix});
  REQUIRE(r.code == 0);
  CHECK(data_lines(prefix + "_grid.csv") == 256u * 256u);
  CHECK(data_lines(prefix + "_curve_y_eq_F.csv") >= 200);
  CHECK(data_lines(prefix + "_curve_x_eq_F.csv") >= 200);
  const std::string head = slurp(prefix + "_grid.csv").substr(0, 17);
  CHECK(head == "x,y,value,label\r\n");
  const Json j = r.json();
  std::size_t total = 0;
  for (const auto& [k, v] : j["label_counts"].items()) total += v.get<std::size_t>();
  CHECK(total == 256u * 256u);
  fs::remove_all(d);
}

TEST_CASE("regions rejects maps that are not two-dimensional") {
  const fs::path d = scratch("k3");
  const fs::path spec = d / "k3.json";
  std::ofstream(spec) << R"({"name": "k3", "k": 3, "expr": "(u1 + u2 + u3)/3", "domain": [0, 10], "fixed_point": 1})";
  const Run r = cli({"regions", "--spec", spec.string(), "--out", (d / "x").string()});
  CHECK(r.code == 1);
  CHECK(r.error()["error"].get<std::string>().find("k") != std::string::npos);
  CHECK(cli({"expand", "--spec", spec.string()}).code == 0);
  fs::remove_all(d);
}

TEST_CASE("map files reject unknown keys and bad expressions") {
  const fs::path d = scratch("spec");
  std::ofstream(d / "extra.json") << R"({"name": "e", "k": 2, "expr": "u1", "domain": [0, 10], "colour": 1})";
  const Run e = cli({"expand", "--spec", (d / "extra.json").string()});
  CHECK(e.code == 1);
  CHECK(e.error()["error"].get<std::string>().find("colour") != std::string::npos);

  std::ofstream(d / "bad.json") << R"({"name": "b", "k": 2, "expr": "u1 +* u2", "domain": [0, 10]})";
  const Run b = cli({"expand", "--spec", (d / "bad.json").string()});
  CHECK(b.code == 1);
  CHECK(b.error()["hint"].get<std::string>().find("offset") != std::string::npos);

  CHECK(cli({"expand", "--map", "decdec", "--spec", (d / "bad.json").string()}).code == 1);
  CHECK(cli({"expand", "--spec", (d / "missing.json").string()}).code == 1);
  fs::remove_all(d);
}

TEST_CASE("expand prints the expansion coefficients") {
  const Run r = cli({"expand", "--map", "linear-neg", "--expansion", "1"});
  REQUIRE(r.code == 0);
  const Json a = r.json()["coefficients"];
  REQUIRE(a.size() == 2);
  CHECK(a[0].get<double>() == doctest::Approx(-6.0 / 25).epsilon(1e-12));
  CHECK(a[1].get<double>() == doctest::Approx(9.0 / 25).epsilon(1e-12));
  CHECK(r.json()["slas"]["slas_index"] == 1);
}

TEST_CASE("envelope with a user g and with the implicit route") {
  const Run g = cli({"envelope", "--map", "decdec-exp1", "--param", "b=1.5", "--g", "(b+1)/(b*u1+1)", "--samples",
                     "20000"});
  CHECK(g.code == 0);
  CHECK(g.json()["pass"] == true);
  const Run f = cli({"envelope", "--map", "decdec-exp1", "--param", "b=0.5", "--g", "max(1.05 - 0.05*u1, 0)",
                     "--samples", "20000"});
  CHECK(f.code == 2);
  CHECK(f.json()["envelope"]["region_check"]["pass"] == false);
  const Run p = cli({"envelope", "--map", "ricker-stocking", "--param", "xbar=1.5", "--samples", "20000"});
  CHECK(p.code == 0);
  CHECK(p.json()["envelope"]["theorem_route"] == "Lem-IncrDecr");
  CHECK(cli({"envelope", "--map", "decdec"}).code == 1);
}

TEST_CASE("embed writes the Omega grid") {
  const fs::path d = scratch("embed");
  const Run r = cli({"embed", "--map", "bx-over-1py", "--param", "b=2", "--csv", (d / "omega.csv").string()});
  CHECK(r.code == 2);
  CHECK(r.json()["embedding"]["omega_empty"] == true);
  CHECK(data_lines(d / "omega.csv") > 0);
  CHECK(slurp(d / "omega.csv").find(",1\r\n") == std::string::npos);
  CHECK(cli({"embed", "--map", "mobius-rational-a"}).code == 1);
  fs::remove_all(d);
}

TEST_CASE("simulate uses original coordinates") {
  const fs::path d = scratch("sim");
  const Run r = cli({"simulate", "--map", "ricker-stocking", "--param", "xbar=1.5", "--init", "0.2,0.4", "--csv",
                     (d / "t.csv").string()});
  REQUIRE(r.code == 0);
  const Json o = r.json()["orbit"];
  CHECK(o["outcome"] == "converged");
  CHECK(o["last_value"].get<double>() == doctest::Approx(1.5).epsilon(1e-7));
  const std::string csv = slurp(d / "t.csv");
  CHECK(csv.rfind("n,y\r\n0,0.2", 0) == 0);
  CHECK(cli({"simulate", "--map", "decdec"}).code == 1);
  CHECK(cli({"simulate", "--map", "decdec", "--init", "-3,1"}).code == 1);
  fs::remove_all(d);
}

TEST_CASE("reports are deterministic for a fixed seed") {
  const std::vector<std::string> args{"analyze", "--map", "down-up-a", "--param", "a=3", "--n", "20", "--seed", "9"};
  CHECK(cli(args).out == cli(args).out);
  const fs::path d = scratch("det");
  std::vector<std::string> a1{"regions", "--map", "decdec", "--n", "32", "--out", (d / "a").string()};
  std::vector<std::string> a2{"regions", "--map", "decdec", "--n", "32", "--out", (d / "b").string()};
  cli(a1);
  cli(a2);
  CHECK(slurp(d / "a_grid.csv") == slurp(d / "b_grid.csv"));
  fs::remove_all(d);
}

TEST_CASE("catalogue lists maps and --out mirrors stdout") {
  const fs::path d = scratch("cat");
  const Run r = cli({"catalogue", "--out", (d / "c.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.json()["maps"].size() >= 10);
  CHECK(slurp(d / "c.json") == r.out);
  fs::remove_all(d);
}

TEST_CASE("config objects reject unknown keys and need one map source") {
  CHECK_THROWS_AS(config_from_json(Json{{"command", "analyze"}, {"map", "decdec"}, {"colour", 1}}), Error);
  const RunConfig c = config_from_json(Json{{"command", "expand"}, {"map", "linear-neg"}, {"expansion", 1}});
  CHECK(run_command(c).report["coefficients"].size() == 2);
  RunConfig none;
  none.command = "expand";
  CHECK_THROWS_AS(load_map(none), Error);
  CHECK_THROWS_AS(run_command(config_from_json(Json{{"command", "bogus"}})), Error);
}
