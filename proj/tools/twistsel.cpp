// twistsel: twist scans, Erdős–Kac reports, squarefree ideal counts and descent audits.

#include <iostream>

#include <CLI11.hpp>

#include "twistsel/cli.hpp"
#include "twistsel/selmer.hpp"

using namespace twistsel;

int main(int argc, char** argv) {
  CLI::App app{"Selmer ranks of quadratic twists and Erdős–Kac statistics"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;

  // Options live on the top level so a flat config file can set any of them.
  app.set_config("--config", "", "flat key = value file; command-line flags override it");
  app.add_option("--a", c.a, "curve y^2 = x^3 + a x^2 + b x")->capture_default_str();
  app.add_option("--b", c.b)->capture_default_str();
  app.add_option("--X", c.X, "cutoff")->capture_default_str();
  app.add_option("--xs", c.x_list, "cutoffs for ek (default X/100, X/10, X) and ideal-count (default X)")->delimiter(',');
  app.add_option("--k", c.k_list, "ek moment orders")->delimiter(',')->capture_default_str();
  app.add_option("--r", c.r_list, "scan tail thresholds")->delimiter(',')->capture_default_str();
  app.add_option("--f", c.f, "ek function: omega | curve-g")->check(CLI::IsMember({"omega", "curve-g"}))->capture_default_str();
  app.add_option("--field,--m", c.field, "Q or a squarefree m for Q(sqrt m)")->capture_default_str();
  app.add_option("--q", c.q, "ideal-count modulus, comma-separated p:idx")->capture_default_str();
  app.add_option("--d", c.d, "ideal-count squarefree divisor of q")->capture_default_str();
  app.add_option("--out", c.output, "output directory")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads (0: all cores)")->capture_default_str();
  app.add_option("--seed", c.seed, "seed for sampled diagnostics")->capture_default_str();
  app.add_option("--inject-fault", c.inject_fault, "audit test hook: local-table");

  auto* scan = app.add_subcommand("scan", "descend every squarefree twist |d| < X; writes twists.csv, summary.json");
  auto* ek = app.add_subcommand("ek", "moments and CDF of an additive function; writes moments.json, cdf.csv, cdf.svg");
  auto* ideal = app.add_subcommand("ideal-count", "squarefree ideal counts per class vs main term; writes sfcount.csv");
  auto* audit = app.add_subcommand("audit", "exact descent invariants over all twists |d| < X");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*scan) cmd_scan(c);
    if (*ek) cmd_ek(c);
    if (*ideal) cmd_ideal_count(c);
    if (*audit) return cmd_audit(c, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
