#pragma once

// 2-isogeny descent over Q for y^2 = x^3 + a x^2 + b x and its quadratic twists:
// local images of the connecting maps, phi- and phi-hat-Selmer ranks, and the
// 2-adic order of the Tamagawa ratio computed two ways.

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twistsel/arith.hpp"
#include "twistsel/characters.hpp"

namespace twistsel {

struct IsogenyPair {
  Int a = 0;
  Int b = 0;
  Int delta_class_E = 0;       // a^2 - 4b, the square class of the discriminant of E
  Int delta_class_Eprime = 0;  // b, the square class of the discriminant of E'
  std::vector<Int> bad_primes;  // primes dividing 2 b (a^2 - 4b)
  bool full_two_torsion = false;      // a^2 - 4b is a square
  bool square_delta_product = false;  // b (a^2 - 4b) is a square
  bool eligible = false;

  Int a_prime() const { return -2 * a; }
  Int b_prime() const { return a * a - 4 * b; }
  std::string to_string() const;
};

/// Throws std::invalid_argument when b (a^2 - 4b) = 0.
IsogenyPair make_pair(Int a, Int b);
/// (E', phi-hat): coefficients (-2a, a^2 - 4b).
IsogenyPair dual_pair(const IsogenyPair& pair);

/// The twist y^2 = x^3 + a d x^2 + b d^2 x.
struct TwistedPair {
  IsogenyPair pair;
  SquarefreeInt d;

  Int a() const { return pair.a * d.value(); }
  Int b() const { return pair.b * d.value() * d.value(); }
};

/// Solvable local classes packed as a bitmask over square_class_bits values.
struct LocalImage {
  std::uint32_t mask = 1;
  int dim() const;
  bool contains(unsigned bits) const { return (mask >> bits) & 1u; }
};

/// Image of E'(Q_v) in Q_v^*/Q_v^*^2 for the twist by d, by testing every local
/// class on the quartic torsor.
LocalImage local_image(const IsogenyPair& pair, Int d, Place v);

/// The four-case table at a good odd prime: 1 + ((b/p) - ((a^2-4b)/p)) / 2.
int local_dim_good_ramified(const IsogenyPair& pair, Int p);
/// log2 of the number of solvable local classes for the twist by d.
int local_dim(const IsogenyPair& pair, Int d, Place v);

/// g(chi_d): sum over p | d with p not dividing 2 Delta of ((b/p) - ((a^2-4b)/p)) / 2.
int g_chi(const IsogenyPair& pair, Int d);
int g_chi(const IsogenyPair& pair, const QuadraticCharacter& chi);

struct SelmerDescentResult {
  Int d = 1;
  std::vector<std::pair<Place, int>> local_dims;  // real place and every prime dividing 2 Delta d
  int dim_selphi = 0;
  int dim_selphihat = 0;
  int ord2T_product = 0;  // sum over places of (dim - 1)
  int ord2T_ratio = 0;    // dim_selphi - dim_selphihat
  int g_chi = 0;
  int correction = 0;  // sum over v | 2 Delta infinity of (dim - 1)

  int ord2T() const { return ord2T_product; }
  int local_dim_at(Place v) const;
  friend bool operator==(const SelmerDescentResult&, const SelmerDescentResult&) = default;
};

/// Raised by descend when the computed data violate the product formula or
/// the decomposition ord2T = g + correction; what() carries all local data.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what, Int d = 0) : std::runtime_error(what), d_(d) {}
  /// The twist being descended, 0 if unknown.
  Int d() const { return d_; }

 private:
  Int d_;
};

struct DescentOptions {
  /// Test hook: may rewrite a local image before it is used (dual = phi-hat side).
  std::function<void(Place, bool dual, LocalImage&)> perturb;
};

/// Precomputed local images for the twists of one curve: the real place, the
/// bad primes (per local class of d) and good primes below `prime_bound`
/// (per class of d at a ramified prime). Immutable after construction.
class DescentTables {
 public:
  DescentTables(const IsogenyPair& pair, Int prime_bound, unsigned threads = 1);

  const IsogenyPair& pair() const { return pair_; }
  /// Local image at v of the twist by d (phi side, or phi-hat side when dual).
  LocalImage image(Place v, Int d, bool dual) const;

 private:
  IsogenyPair pair_;
  Int prime_bound_;
  std::array<std::array<LocalImage, 2>, 2> real_{};  // [dual][sign]
  std::vector<std::pair<Int, std::array<std::vector<LocalImage>, 2>>> bad_;  // p -> [dual][class bits]
  std::vector<std::int32_t> good_index_;  // p -> slot, -1 if not a good prime
  std::vector<std::array<LocalImage, 4>> good_;  // slot -> [dual * 2 + residue bit]
};

SelmerDescentResult descend(const DescentTables& tables, SquarefreeInt d, const std::vector<Int>& primes_of_d,
                            const DescentOptions& options = {});
/// Twist by any nonzero d (reduced to its squarefree part).
SelmerDescentResult descend(const IsogenyPair& pair, Int d, const DescentOptions& options = {});

int selmer_phi_dim(const IsogenyPair& pair, Int d);
int selmer_phihat_dim(const IsogenyPair& pair, Int d);

/// ord2T - 2, a lower bound for d_2 of the twist (vacuous when negative).
int selmer2_lower_bound(const SelmerDescentResult& result);

struct ScanOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::size_t block = 1 << 15;
  DescentOptions descent;
};

/// Descends every squarefree 0 < |d| < X in (|d|, sign) order, handing results
/// to `sink` in that order. Throws std::invalid_argument for ineligible pairs.
void scan_twists(const IsogenyPair& pair, Int X, const ScanOptions& options,
                 const std::function<void(const SelmerDescentResult&)>& sink);
std::vector<SelmerDescentResult> scan_twists(const IsogenyPair& pair, Int X, const ScanOptions& options = {});

}  // namespace twistsel
