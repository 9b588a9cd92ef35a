#include "cli.hpp"

#include "swibal/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using swibal::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = swibal::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("swibal_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"analyze"}).code == 1);
  CHECK(run({"analyze", "/nonexistent/model.json"}).code == 1);
  CHECK(run({"example", "example3"}).code == 1);
  CHECK(run({"--help"}).code == 0);

  const fs::path d = scratch_dir("usage");
  REQUIRE(run({"example", "example1", "--out", d.string()}).code == 0);
  const std::string model = (d / "model.json").string();
  CHECK(run({"reduce", model, "--out", d.string()}).code == 1);
  CHECK(run({"reduce", model, "--r", "2", "--tol", "1e-3", "--out", d.string()}).code == 1);
  CHECK(run({"reduce", model, "--r", "2", "--baseline", "sum", "--out", d.string()}).code == 1);

  write(d / "broken.json", "{\"n\": 2");
  CHECK(run({"analyze", (d / "broken.json").string(), "--out", d.string()}).code == 1);
  write(d / "shape.json",
        R"({"n":2,"m":1,"p":1,"modes":[{"A":[[-1,0],[0,-1]],"B":[[1]],"C":[[1,0]]}]})");
  const Run r = run({"analyze", (d / "shape.json").string(), "--out", d.string()});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "error"));
  fs::remove_all(d);
}

TEST_CASE("analyze example1") {
  const fs::path d = scratch_dir("analyze");
  REQUIRE(run({"example", "example1", "--out", d.string()}).code == 0);
  const Run r = run({"analyze", (d / "model.json").string(), "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "reachability: not completely reachable (rank 5/8)"));
  CHECK(contains(r.out, "range(P_avg) in range(P): yes"));
  const Json j = swibal::read_json(d / "analysis.json");
  CHECK(j["reachability"]["rank"] == 5);
  CHECK(j["reachability"]["completely_reachable"] == false);
  CHECK(j["averaged"]["reach_rank"] == 2);
  fs::remove_all(d);
}

TEST_CASE("analyze a single-mode controllable and observable model") {
  const fs::path d = scratch_dir("lti");
  write(d / "lti.json",
        R"({"n":2,"m":1,"p":1,"modes":[{"A":[[-1,1],[0,-2]],"B":[[0],[1]],"C":[[1,0]]}]})");
  const Run r = run({"analyze", (d / "lti.json").string(), "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "reachability: completely reachable"));
  CHECK(contains(r.out, "observability: completely observable"));
  const Run o = run({"oracle", (d / "lti.json").string(), "--out", d.string()});
  CHECK(o.code == 0);
  CHECK(contains(o.out, "reachable: MATCH: rank 2"));
  fs::remove_all(d);
}

TEST_CASE("a divergent generalized series exits with 2 and names the existence condition") {
  const fs::path d = scratch_dir("diverged");
  write(d / "div.json", R"({"n":2,"m":1,"p":1,"modes":[
      {"A":[[-1,0],[0,-1]],"B":[[1],[1]],"C":[[1,1]]},
      {"A":[[-1,50],[0,-1]],"B":[[1],[0]],"C":[[1,0]]},
      {"A":[[-1,0],[50,-1]],"B":[[0],[1]],"C":[[0,1]]}]})");
  const Run r = run({"analyze", (d / "div.json").string(), "--method", "fixedpoint",
                     "--out", d.string()});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "Diverged"));
  CHECK(contains(r.err, "2 alpha / beta^2"));
  fs::remove_all(d);
}

TEST_CASE("oracle on example1 and a seeded sweep") {
  const fs::path d = scratch_dir("oracle");
  REQUIRE(run({"example", "example1", "--out", d.string()}).code == 0);
  const Run r = run({"oracle", (d / "model.json").string(), "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "reachable: MATCH: rank 5, max principal angle"));

  const Run s1 = run({"oracle", "--sweep", "20", "--seed", "7", "--out", d.string()});
  CHECK(s1.code == 0);
  CHECK(contains(s1.out, "20 instances, 0 mismatches"));
  const std::string first = slurp(d / "oracle_sweep.csv");
  REQUIRE(run({"oracle", "--sweep", "20", "--seed", "7", "--out", d.string()}).code == 0);
  CHECK(slurp(d / "oracle_sweep.csv") == first);
  CHECK(run({"oracle", "--out", d.string()}).code == 1);
  fs::remove_all(d);
}

TEST_CASE("reduce, simulate and compare on example2") {
  const fs::path d = scratch_dir("pipeline");
  const fs::path g = d / "gen", a = d / "avg";
  REQUIRE(run({"example", "example2", "--n", "40", "--out", d.string()}).code == 0);
  const std::string model = (d / "model.json").string();
  const std::string scen = (d / "scenario.json").string();

  const Run rg = run({"reduce", model, "--r", "15", "--out", g.string()});
  REQUIRE(rg.code == 0);
  const Json red = swibal::read_json(g / "reduced.json");
  CHECK(red["n"] == 15);
  CHECK(red["reduction"]["gramians"] == "generalized");
  CHECK(contains(slurp(g / "bound.txt"), "r 15\n"));
  CHECK(slurp(g / "hsv.csv").rfind("index,sigma\n", 0) == 0);
  // A reduced model re-validates.
  CHECK(run({"analyze", (g / "reduced.json").string(), "--out", g.string()}).code == 0);

  REQUIRE(run({"reduce", model, "--r", "10", "--baseline", "averaged", "--out", a.string()})
              .code == 0);
  CHECK(swibal::read_json(a / "reduced.json")["reduction"]["gramians"] == "averaged");

  const Run c = run({"compare", model, (g / "reduced.json").string(),
                     (a / "reduced.json").string(), scen, "--out", d.string()});
  REQUIRE(c.code == 0);
  std::istringstream csv(slurp(d / "comparison.csv"));
  std::string header, row1, row2;
  std::getline(csv, header);
  std::getline(csv, row1);
  std::getline(csv, row2);
  CHECK(header == "reduced,r,gramians,l2_error,linf_error,bound,bound_satisfied");
  const auto field = [](const std::string& row, int k) {
    std::istringstream in(row);
    std::string f;
    for (int i = 0; i <= k; ++i) std::getline(in, f, ',');
    return f;
  };
  CHECK(field(row1, 2) == "generalized");
  CHECK(field(row1, 6) == "true");
  CHECK(std::stod(field(row1, 3)) <= std::stod(field(row1, 5)));
  CHECK(10.0 * std::stod(field(row1, 3)) < std::stod(field(row2, 3)));

  REQUIRE(run({"compare", model, model, scen, "--out", d.string()}).code == 0);
  std::istringstream same(slurp(d / "comparison.csv"));
  std::getline(same, header);
  std::getline(same, row1);
  CHECK(std::stod(field(row1, 3)) == 0.0);
  fs::remove_all(d);
}

TEST_CASE("reduce --tol records the chosen order and capped requests warn") {
  const fs::path d = scratch_dir("tol");
  REQUIRE(run({"example", "example2", "--n", "30", "--out", d.string()}).code == 0);
  const std::string model = (d / "model.json").string();
  REQUIRE(run({"reduce", model, "--tol", "1e-6", "--out", d.string()}).code == 0);
  const std::string bound = slurp(d / "bound.txt");
  const int r = swibal::read_json(d / "reduced.json")["n"];
  CHECK(contains(bound, "r " + std::to_string(r) + "\n"));

  const fs::path e1 = d / "e1";
  REQUIRE(run({"example", "example1", "--out", e1.string()}).code == 0);
  const std::string m1 = (e1 / "model.json").string();
  const Run full = run({"reduce", m1, "--r", "8", "--out", e1.string()});
  CHECK(full.code == 0);
  const int capped = swibal::read_json(e1 / "reduced.json")["n"];
  CHECK(capped < 8);
  CHECK(contains(slurp(e1 / "bound.txt"), "r " + std::to_string(capped) + "\n"));
  CHECK(contains(slurp(e1 / "bound.txt"), "warning"));
  CHECK(run({"reduce", m1, "--r", "9", "--out", e1.string()}).code == 2);
  fs::remove_all(d);
}

TEST_CASE("simulate is deterministic and zero input gives zero output") {
  const fs::path d = scratch_dir("simulate");
  REQUIRE(run({"example", "example2", "--n", "20", "--out", d.string()}).code == 0);
  const std::string model = (d / "model.json").string();
  const std::string scen = (d / "scenario.json").string();
  REQUIRE(run({"simulate", model, scen, "--out", d.string()}).code == 0);
  const std::string first = slurp(d / "trajectory.csv");
  REQUIRE(run({"simulate", model, scen, "--out", d.string()}).code == 0);
  CHECK(slurp(d / "trajectory.csv") == first);
  CHECK(first.rfind("t,mode,y_1\n0,1,0\n", 0) == 0);
  CHECK(contains(first, "\n6,1,"));
  CHECK(std::count(first.begin(), first.end(), '\n') == 6002);

  Json s = swibal::read_json(scen);
  s["input"] = {{"type", "zero"}};
  write(d / "zero.json", s.dump());
  REQUIRE(run({"simulate", model, (d / "zero.json").string(), "--states", "--h", "0.01",
               "--out", d.string()})
              .code == 0);
  std::istringstream in(slurp(d / "trajectory.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(contains(line, ",x_20"));
  bool all_zero = true;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string f;
    std::getline(row, f, ',');
    std::getline(row, f, ',');
    while (std::getline(row, f, ',')) all_zero = all_zero && std::stod(f) == 0.0;
  }
  CHECK(all_zero);
  fs::remove_all(d);
}
