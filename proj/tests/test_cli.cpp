#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "twistsel/cli.hpp"
#include "twistsel/selmer.hpp"

using namespace twistsel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "twistsel_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("scan writes the twist table") {
  RunConfig c;
  c.X = 10;
  c.output = scratch("scan10");
  cmd_scan(c);
  auto rows = read_csv(c.output / "twists.csv");
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == std::vector<std::string>{"d", "g_chi", "correction", "ord2T", "dim_selphi", "dim_selphihat", "d2_lower_bound"});
  CHECK(rows[1][0] == "1");
  CHECK(rows[1][1] == "0");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int g = std::stoi(rows[i][1]), corr = std::stoi(rows[i][2]), ord = std::stoi(rows[i][3]);
    CHECK(ord == g + corr);
    CHECK(std::stoi(rows[i][4]) - std::stoi(rows[i][5]) == ord);
    CHECK(std::stoi(rows[i][6]) == ord - 2);
  }
  const auto summary = nlohmann::json::parse(slurp(c.output / "summary.json"));
  CHECK(summary["schema_version"] == kSchemaVersion);
  CHECK(summary["twists"] == 12);
  CHECK(summary.contains("tail_fractions"));
  CHECK(summary.contains("normalization"));
  CHECK(slurp(c.output / "twists.csv").find('\r') == std::string::npos);
}

TEST_CASE("scan output is byte-identical across runs and thread counts") {
  RunConfig c;
  c.X = 20000;
  c.threads = 1;
  c.output = scratch("scan_a");
  cmd_scan(c);
  RunConfig d = c;
  d.threads = 4;
  d.output = scratch("scan_b");
  cmd_scan(d);
  CHECK(slurp(c.output / "twists.csv") == slurp(d.output / "twists.csv"));
  CHECK(slurp(c.output / "summary.json") == slurp(d.output / "summary.json"));

  const auto summary = nlohmann::json::parse(slurp(c.output / "summary.json"));
  std::size_t total = 0;
  for (auto& [k, v] : summary["ord2T_counts"].items()) total += v.get<std::size_t>();
  CHECK(total == summary["twists"].get<std::size_t>());
}

TEST_CASE("scan rejects bad curves") {
  RunConfig c;
  c.output = scratch("scan_bad");
  c.a = 6;
  c.b = 5;
  CHECK_THROWS_AS(cmd_scan(c), ConfigError);
  c.a = 0;
  c.b = 0;
  CHECK_THROWS_AS(cmd_scan(c), ConfigError);
  c.a = 1;
  c.b = -1;
  c.X = 1;
  CHECK_THROWS_AS(cmd_scan(c), ConfigError);
}

TEST_CASE("ek reports") {
  RunConfig c;
  c.f = "omega";
  c.X = 1000000;
  c.x_list = {10000, 100000, 1000000};
  c.k_list = {1, 2};
  c.output = scratch("ek");
  cmd_ek(c);
  const auto j = nlohmann::json::parse(slurp(c.output / "moments.json"));
  CHECK(j["schema_version"] == kSchemaVersion);
  REQUIRE(j["distributions"].size() == 3);
  double previous = 1.0;
  for (const auto& d : j["distributions"]) {
    CHECK(d["ks"].get<double>() <= previous);
    previous = d["ks"].get<double>();
  }
  bool has_k2 = false;
  for (const auto& m : j["moments"])
    if (m["k"] == 2) has_k2 = m.contains("ratio");
  CHECK(has_k2);

  const std::string svg = slurp(c.output / "cdf.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count_of(svg, "<polyline") == 2);
  CHECK(count_of(svg, "<svg") == 1);
  CHECK(count_of(svg, "</svg>") == 1);
  CHECK(svg.find("<script") == std::string::npos);
  // Every opened element is self-closed or closed.
  CHECK(count_of(svg, "<text") == count_of(svg, "</text>"));

  auto rows = read_csv(c.output / "cdf.csv");
  CHECK(rows[0] == std::vector<std::string>{"X", "grid", "empirical", "gaussian"});

  RunConfig again = c;
  again.output = scratch("ek_again");
  cmd_ek(again);
  CHECK(slurp(c.output / "moments.json") == slurp(again.output / "moments.json"));
  CHECK(slurp(c.output / "cdf.svg") == slurp(again.output / "cdf.svg"));
  CHECK(slurp(c.output / "cdf.csv") == slurp(again.output / "cdf.csv"));

  RunConfig g;
  g.f = "curve-g";
  g.X = 100000;
  g.output = scratch("ek_g");
  cmd_ek(g);
  const auto jg = nlohmann::json::parse(slurp(g.output / "moments.json"));
  CHECK(jg["moments"].empty());
  CHECK(jg["distributions"].size() == 3);

  RunConfig bad = c;
  bad.f = "sigma";
  CHECK_THROWS_AS(cmd_ek(bad), ConfigError);
  bad = c;
  bad.field = "x";
  CHECK_THROWS_AS(cmd_ek(bad), ConfigError);
}

TEST_CASE("ideal-count") {
  RunConfig c;
  c.field = "-1";
  c.X = 100000;
  c.output = scratch("ic1");
  cmd_ideal_count(c);
  auto rows = read_csv(c.output / "sfcount.csv");
  CHECK(rows[0] == std::vector<std::string>{"X", "class", "q", "d", "brute_count", "main_term", "gap", "normalized_gap"});
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(std::stod(rows[1][7])) <= 5);

  RunConfig five;
  five.field = "-5";
  five.x_list = {1000, 10000};
  five.q = "3:0,7:1";
  five.d = "3:0";
  five.output = scratch("ic5");
  cmd_ideal_count(five);
  rows = read_csv(five.output / "sfcount.csv");
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][1] == "1");
  CHECK(rows[2][1] != "1");
  CHECK(rows[1][2] == "3:0,7:1");

  // Classes partition the unconstrained count.
  auto K = make_field(-5);
  const IdealK q = parse_ideal(K, "3:0,7:1"), d = parse_ideal(K, "3:0");
  Int total = 0;
  for (auto& rep : K.classes().representatives) total += count_sf(K, 10000, rep, q, d);
  CHECK(std::stoll(rows[3][4]) + std::stoll(rows[4][4]) == total);
  Int unconstrained = 0;
  for (const auto& a : squarefree_ideals_up_to(K, 10000))
    if (a.gcd(q) == d) ++unconstrained;
  CHECK(total == unconstrained);

  RunConfig bad = five;
  bad.d = "2:0";
  CHECK_THROWS_AS(cmd_ideal_count(bad), ConfigError);
  bad = five;
  bad.field = "Q";
  CHECK_THROWS_AS(cmd_ideal_count(bad), ConfigError);
}

TEST_CASE("audit exit codes") {
  RunConfig c;
  c.X = 10000;
  std::ostringstream out;
  CHECK(cmd_audit(c, out) == 0);
  CHECK(nlohmann::json::parse(out.str())["status"] == "pass");

  RunConfig singular = c;
  singular.a = 0;
  singular.b = 0;
  std::ostringstream out2;
  CHECK(cmd_audit(singular, out2) == 2);

  RunConfig faulty = c;
  faulty.X = 1000;
  faulty.inject_fault = "local-table";
  std::ostringstream out3;
  CHECK(cmd_audit(faulty, out3) == 1);
  const auto rec = nlohmann::json::parse(out3.str());
  CHECK(rec["status"] == "fail");
  CHECK(rec["check"] == "descent_consistency");

  RunConfig unknown = c;
  unknown.inject_fault = "bogus";
  std::ostringstream out4;
  CHECK(cmd_audit(unknown, out4) == 2);
}
