#pragma once

// Batch commands behind the twistsel tool. Each command reads a RunConfig and
// writes its outputs into config.output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "twistsel/arith.hpp"

namespace twistsel {

struct RunConfig {
  Int a = 1;
  Int b = -1;
  std::string field = "Q";  // "Q" or a squarefree m
  Int X = 10000;
  std::vector<Int> x_list;  // extra cutoffs for ek / ideal-count; empty means defaults
  std::vector<int> k_list{1, 2, 3, 4};
  std::vector<int> r_list{0, 1, 2, 3};
  std::uint64_t seed = 1;
  std::filesystem::path output = ".";
  std::string f = "omega";  // ek: omega | curve-g
  std::string q = "1";      // ideal-count: comma list of p:idx
  std::string d = "1";
  unsigned threads = 0;
  std::string inject_fault;  // audit test hook: "" or "local-table"
};

/// Invalid configuration (bad curve, field, ideal spec or cutoff).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

/// twists.csv and summary.json.
void cmd_scan(const RunConfig& config);
/// moments.json, cdf.csv and cdf.svg.
void cmd_ek(const RunConfig& config);
/// sfcount.csv.
void cmd_ideal_count(const RunConfig& config);
/// Exact invariant suite; prints one JSON record to `out`. Returns 0 on pass,
/// 1 on an exact-identity failure, 2 on a configuration error.
int cmd_audit(const RunConfig& config, std::ostream& out);

/// Sorted, deduplicated cutoffs for ek: x_list, or X/100, X/10, X (those >= 10).
std::vector<Int> ek_cutoffs(const RunConfig& config);

}  // namespace twistsel
