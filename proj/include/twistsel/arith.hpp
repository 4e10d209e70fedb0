#pragma once

// Exact rational-prime arithmetic: sieves, Kronecker symbols, squarefree
// decomposition, local square classes and local solvability of the quartic
// torsors attached to a 2-isogeny.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace twistsel {

using Int = std::int64_t;
using BigInt = boost::multiprecision::cpp_int;

/// A place of Q: a finite prime p or the real place.
class Place {
 public:
  static constexpr Place real() { return Place{0}; }
  static Place at_prime(Int p);

  constexpr bool is_real() const { return p_ == 0; }
  constexpr Int prime() const { return p_; }
  std::string to_string() const;

  friend constexpr auto operator<=>(const Place&, const Place&) = default;

 private:
  constexpr explicit Place(Int p) : p_(p) {}
  Int p_;
};

/// Primes strictly below `bound`, ascending.
class PrimeTable {
 public:
  PrimeTable(Int bound, std::vector<Int> primes) : bound_(bound), primes_(std::move(primes)) {}

  Int bound() const { return bound_; }
  std::span<const Int> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  bool contains(Int n) const;

 private:
  Int bound_;
  std::vector<Int> primes_;
};

PrimeTable sieve_primes(Int bound);

/// Smallest-prime-factor table on [0, bound); used to factor many small
/// integers quickly.
class FactorSieve {
 public:
  explicit FactorSieve(Int bound);
  Int bound() const { return static_cast<Int>(spf_.size()); }
  /// Distinct prime factors of |n| ascending, with multiplicities.
  std::vector<std::pair<Int, int>> factor(Int n) const;

 private:
  std::vector<std::int32_t> spf_;
};

/// Kronecker symbol (a/n), extended to n <= 0 and even n by the classical
/// conventions. Throws std::invalid_argument for n == 0.
int kronecker(Int a, Int n);

/// Legendre-symbol style quadratic residuosity of a (possibly huge) integer
/// modulo an odd prime.
int legendre(const BigInt& a, Int p);

bool is_prime(Int n);
bool is_perfect_square(Int n);
Int isqrt(Int n);
BigInt isqrt(const BigInt& n);

/// p-adic valuation of a nonzero integer.
int valuation(Int n, Int p);
int valuation(const BigInt& n, Int p);

/// Trial-division factorization of |n| (n != 0).
std::vector<std::pair<Int, int>> factorize(Int n);
std::vector<Int> prime_divisors(Int n);

Int powi(Int base, int exp);
Int mulmod(Int a, Int b, Int m);
Int powmod(Int base, Int exp, Int m);
Int invmod(Int a, Int m);

/// Least positive quadratic nonresidue mod an odd prime.
Int least_nonresidue(Int p);
/// A square root of a modulo an odd prime p (a must be a residue).
Int sqrtmod(Int a, Int p);

/// A nonzero squarefree integer, sign carried.
class SquarefreeInt {
 public:
  /// Throws std::invalid_argument unless n is nonzero and squarefree.
  static SquarefreeInt from(Int n);
  SquarefreeInt() = default;

  Int value() const { return value_; }
  friend auto operator<=>(const SquarefreeInt&, const SquarefreeInt&) = default;

 private:
  friend SquarefreeInt squarefree_part(Int d);
  friend std::vector<SquarefreeInt> sieve_squarefree(Int X);
  explicit SquarefreeInt(Int n) : value_(n) {}
  Int value_ = 1;
};

bool is_squarefree(Int n);

/// s squarefree with d / s a positive perfect square. Throws for d == 0.
SquarefreeInt squarefree_part(Int d);

/// All squarefree d with 0 < |d| < X, ordered by |d| then sign (+d first).
std::vector<SquarefreeInt> sieve_squarefree(Int X);

/// An element of Q_v^* / (Q_v^*)^2 with its canonical squarefree representative.
struct SquareClassLocal {
  Place place;
  Int representative;
  friend auto operator<=>(const SquareClassLocal&, const SquareClassLocal&) = default;
};

/// Complete list of square classes at a place:
/// real {1,-1}; p = 2 {1,-1,2,-2,5,-5,10,-10}; odd p {1,u,p,up}.
std::vector<SquareClassLocal> local_square_classes(Place place);

/// Canonical representative (from local_square_classes) of the class of n.
Int local_class_representative(Place place, Int n);

/// Coordinates of the class of n in Q_v^*/(Q_v^*)^2 as an F_2 vector packed
/// into the low bits: real 1 bit (sign), odd p 2 bits (valuation parity,
/// nonresidue), p = 2 3 bits (valuation parity, unit = 3 mod 4, unit = +-3 mod 8).
unsigned square_class_bits(Place place, Int n);
int square_class_rank(Place place);

/// Whether delta*w^2 = delta^2 - 2*a*delta*z^2 + (a^2 - 4b)*z^4 has a
/// projective point over the completion of Q at `place`.
/// Throws std::invalid_argument when b*(a^2-4b) == 0 or when delta does not
/// belong to `place`.
bool torsor_locally_solvable(Int a, Int b, const SquareClassLocal& delta, Place place);

/// Same question for an arbitrary nonzero integer delta and big coefficients.
bool torsor_solvable(const BigInt& a, const BigInt& b, const BigInt& delta, Place place);

}  // namespace twistsel
