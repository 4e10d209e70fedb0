#pragma once

// Erdős–Kac statistics for additive functions on quadratic characters:
// prime sums, centered moments, Gaussian comparison and twist-family tails.

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "twistsel/characters.hpp"
#include "twistsel/selmer.hpp"

namespace twistsel {

/// sum over N(pi) < X of f(pi) / N(pi)
double mu_f(const AdditiveFunctionSpec& f, Int X);
/// (sum over N(pi) < X of f(pi)^2 / N(pi))^(1/2)
double sigma_f(const AdditiveFunctionSpec& f, Int X);
/// sum over N(pi) < X of f(pi) / (N(pi) + 1)
double mu_tilde_f(const AdditiveFunctionSpec& f, Int X);

/// f(pi)(1 - 1/(N pi + 1)) when pi divides the conductor of chi, else -f(pi)/(N pi + 1).
double centered_g(const AdditiveFunctionSpec& f, const PrimeRef& pi, const QuadraticCharacter& chi);

/// k! / (2^(k/2) (k/2)!) for even k >= 2; throws std::invalid_argument otherwise.
double moment_constant(int k);
/// Gamma(k+1) / (2^(k/2) Gamma(k/2 + 1)) for any k >= 1.
double moment_constant_gamma(int k);

struct MomentReport {
  Int X = 0;
  double z = 0;
  int k = 0;
  double empirical = 0;
  double predicted = 0;  // c_k sigma^k, or the bound c_k sigma^(k-1) k^(3/2) for odd k
  double ratio = 0;
  double sigma = 0;  // sigma_f(z)
  bool odd_branch = false;
  bool outside_uniform_range = false;  // k > sigma^(2/3)
};

/// Average over C(K, X) of (sum over N pi < z of g_pi(chi))^k; z defaults to X^(1/(2k)).
MomentReport empirical_moment(const AdditiveFunctionSpec& f, Int X, int k, std::optional<double> z = {});

/// G(q) for q given as prime powers; zero unless every exponent is at least 2.
double mainterm_G(const AdditiveFunctionSpec& f, std::span<const std::pair<PrimeRef, int>> q);

/// Standard normal CDF.
double gaussian_cdf(double z);

struct DistributionReport {
  std::size_t n = 0;
  double center = 0;
  double scale = 1;
  bool integer_valued = false;
  std::vector<double> grid;  // normalized evaluation points
  std::vector<double> empirical_cdf;
  std::vector<double> gaussian_cdf;
  double ks = 0;
};

/// Empirical CDF of (v - center) / scale against the Gaussian. Integer-valued
/// samples are evaluated at half-integers; otherwise at the sample points with
/// left limits included in ks. Throws std::invalid_argument when scale <= 0 or
/// values is empty.
DistributionReport distribution_report(std::span<const double> values, double center, double scale);

/// sum over N pi <= X of (1 + (c/pi)) / N pi; throws std::invalid_argument for square c.
double mertens_char_sum(Int c, Int X);
/// Over a quadratic field; primes above 2 contribute 1/N pi.
double mertens_char_sum(const QuadraticField& K, const Element& c, Int X);

/// sqrt(log log X / 2); throws std::invalid_argument when log log X <= 0.
double sigma_g_predicted(double X);
/// (1/2 sum over p < X, p not dividing 2 Delta, of (1 - (Delta Delta'/p)) / p)^(1/2).
double sigma_g_exact(const IsogenyPair& pair, Int X);

/// f(p) = ((b/p) - ((a^2 - 4b)/p)) / 2 away from 2 Delta, so that f(chi_d) = g(chi_d).
AdditiveFunctionSpec curve_g_function(const IsogenyPair& pair);

/// Fraction of twists with ord2T >= r; throws std::invalid_argument on empty input.
double tail_fraction(std::span<const SelmerDescentResult> results, int r);
double tail_fraction(const std::map<int, std::size_t>& ord2T_histogram, int r);

}  // namespace twistsel
