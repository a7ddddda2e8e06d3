#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snlab/cli.hpp"
#include "snlab/errors.hpp"

using namespace snlab;
using nlohmann::json;

#ifndef SNLAB_DATA_DIR
#define SNLAB_DATA_DIR "data"
#endif

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "snlab");
  std::ostringstream o, e;
  Run r;
  r.code = run(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

std::string data(const std::string& name) { return std::string(SNLAB_DATA_DIR) + "/" + name; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

json error_of(const Run& r) { return json::parse(r.err)["error"]; }

}  // namespace

TEST_CASE("parse_grid") {
  CHECK(parse_grid("0:1:5") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_grid("2:3:1") == std::vector<double>{2.0});
  CHECK(parse_grid("1:-1:3") == std::vector<double>{1.0, 0.0, -1.0});
  CHECK_THROWS_AS(parse_grid("0:1"), DomainError);
  CHECK_THROWS_AS(parse_grid("0:1:x"), DomainError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), DomainError);
  CHECK_THROWS_AS(parse_grid("0:1:2:3"), DomainError);
}

TEST_CASE("center on the factorial example") {
  const Run r = run_cli({"center", "--spec", data("euler.json"), "--K", "20"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 20);
  CHECK(rows[0][0] == "k");
  CHECK(rows[0][3] == "m");
  double fact = 1.0;
  for (int k = 2; k <= 20; ++k) {
    fact *= (k - 1);
    const double m = std::stod(rows[static_cast<size_t>(k - 1)][3]);
    CHECK(m == doctest::Approx((k % 2 ? -1.0 : 1.0) * fact).epsilon(1e-14));
  }
  const json s = json::parse(r.err)["summary"];
  CHECK(s["S_infty_estimate"].get<double>() == 1.0);
  CHECK(s["converged"].get<bool>());
}

TEST_CASE("center output is deterministic and honours --format and --out") {
  const Run a = run_cli({"center", "--spec", data("family_point.json"), "--K", "40"});
  const Run b = run_cli({"center", "--spec", data("family_point.json"), "--K", "40"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find('\r') == std::string::npos);

  const Run j = run_cli({"center", "--spec", data("euler.json"), "--K", "6", "--format", "json"});
  REQUIRE(j.code == 0);
  std::vector<json> lines;
  std::istringstream in_lines(j.out);
  for (std::string line; std::getline(in_lines, line);) lines.push_back(json::parse(line));
  REQUIRE(lines.size() == 5);
  CHECK(lines[1]["k"].get<int>() == 3);
  CHECK(lines[1]["m"].get<double>() == -2.0);

  const std::string path = "snlab_cli_test_out.csv";
  const Run f = run_cli({"center", "--spec", data("euler.json"), "--K", "6", "--out", path});
  REQUIRE(f.code == 0);
  CHECK(f.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == run_cli({"center", "--spec", data("euler.json"), "--K", "6"}).out);
  std::remove(path.c_str());
}

TEST_CASE("error exit codes and JSON diagnostics") {
  const Run bad = run_cli({"center", "--spec", data("bad_a0.json")});
  CHECK(bad.code == 4);
  CHECK(error_of(bad)["kind"] == "hypothesis_violation");
  CHECK(error_of(bad)["exit_code"] == 4);

  const Run flag = run_cli({"center", "--bogus"});
  CHECK(flag.code == 2);
  CHECK(error_of(flag)["kind"] == "usage");

  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"nonsense"}).code == 2);
  CHECK(run_cli({"center", "--spec", data("euler.json"), "--format", "xml"}).code == 2);

  const Run missing = run_cli({"center", "--spec", "/nonexistent.json"});
  CHECK(missing.code == 13);
  CHECK(error_of(missing)["kind"] == "io");

  const Run res = run_cli({"unfold", "--spec", data("family_point.json"), "--eps", "0.1"});
  CHECK(res.code == 5);
  CHECK(error_of(res)["kind"] == "resonance");

  const Run grid = run_cli({"vbar", "--eps", "0.095", "--x-grid", "0:1"});
  CHECK(grid.code == 6);

  const Run help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK_FALSE(help.out.empty());
}

TEST_CASE("locus-fold") {
  const Run r = run_cli({"locus-fold", "--spec", data("family.json")});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::fabs(j["p_star"].get<double>() - 1.94) <= 0.02);
  CHECK(std::fabs(j["f2_star"].get<double>() - 1.09) <= 0.02);
  CHECK(j["dS_dp"].get<double>() < 0.0);
  CHECK(run_cli({"locus-fold", "--p-lo", "0.5", "--p-hi", "1.0"}).code == 7);
}

TEST_CASE("sinfty-scan") {
  const Run r = run_cli({"sinfty-scan", "--f2-grid", "0:2:3", "--p-grid", "0:1:2", "--jobs", "2"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"p", "f2", "S", "residual", "flagged"});
  CHECK(std::stod(rows[2][2]) == 1.0);
  CHECK(json::parse(r.err)["summary"]["points"] == 6);
  CHECK(r.out == run_cli({"sinfty-scan", "--f2-grid", "0:2:3", "--p-grid", "0:1:2"}).out);
}

TEST_CASE("remaining subcommands run") {
  const Run u = run_cli({"unfold", "--spec", data("family_point.json"), "--eps", "0.0952380952380952"});
  CHECK(u.code == 0);
  CHECK(csv_rows(u.out).size() == 10);
  CHECK(json::parse(u.err)["summary"]["N"] == 10);

  const Run v = run_cli({"vbar", "--N", "8", "--alpha", "0.5", "--x-grid", "0:0.75:4"});
  CHECK(v.code == 0);
  CHECK(csv_rows(v.out).size() == 5);

  const Run f = run_cli({"flap", "--spec", data("family_point.json"), "--N", "9", "--alpha-grid", "0.25:0.75:2"});
  CHECK(f.code == 0);
  const auto rows = csv_rows(f.out);
  REQUIRE(rows.size() == 5);
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i][2] == "right") CHECK(rows[i][3] == "-c");

  const Run p = run_cli({"portrait", "--spec", data("family_point.json"), "--N", "10", "--alpha", "0.5"});
  CHECK(p.code == 0);
  for (const char* name : {"ws_left", "ws_right", "wu_inner", "wu_outer", "ss_node", "s_saddle"})
    CHECK(p.out.find(name) != std::string::npos);

  const Run b = run_cli({"baby", "--u", "1", "--eps", "0.4", "--x-grid", "0:0.5:3"});
  CHECK(b.code == 0);
  const auto br = csv_rows(b.out);
  REQUIRE(br.size() == 4);
  CHECK(std::stod(br[3][1]) == doctest::Approx(1.25));
  CHECK(run_cli({"baby", "--u", "1,x", "--eps", "0.4", "--x-grid", "0:1:2"}).code == 3);
}
