#pragma once

// Ideal arithmetic in quadratic fields Q(sqrt m): prime splitting, factored
// ideals, class group by Minkowski-bound enumeration, units modulo squares
// and the analytic constants that govern squarefree ideal counts.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "twistsel/arith.hpp"

namespace twistsel {

enum class Splitting { split, inert, ramified };

std::string_view to_string(Splitting s);

struct PrimeIdealK {
  Int p = 0;
  Splitting splitting = Splitting::inert;
  int conjugate_index = 0;
  Int norm = 0;

  std::string to_string() const;
  // Norm-ascending, conjugates ordered by index.
  friend std::strong_ordering operator<=>(const PrimeIdealK& x, const PrimeIdealK& y) {
    if (auto c = x.norm <=> y.norm; c != 0) return c;
    if (auto c = x.p <=> y.p; c != 0) return c;
    return x.conjugate_index <=> y.conjugate_index;
  }
  friend bool operator==(const PrimeIdealK& x, const PrimeIdealK& y) {
    return x.p == y.p && x.conjugate_index == y.conjugate_index;
  }
};

/// Integral ideal in factored form. Factors are kept sorted with no repeated
/// prime entries; the unit ideal has an empty factorization.
class IdealK {
 public:
  IdealK() = default;
  static IdealK prime(const PrimeIdealK& pi, int exponent = 1);
  static IdealK from_factors(std::vector<std::pair<PrimeIdealK, int>> factors);

  const std::vector<std::pair<PrimeIdealK, int>>& factors() const { return factors_; }
  Int norm() const { return norm_; }
  bool is_unit() const { return factors_.empty(); }
  bool is_squarefree() const;
  int omega() const { return static_cast<int>(factors_.size()); }
  int exponent(const PrimeIdealK& pi) const;
  bool divides(const IdealK& other) const;
  IdealK gcd(const IdealK& other) const;
  IdealK operator*(const IdealK& other) const;
  IdealK squared() const { return *this * *this; }
  /// Comma-separated `p:idx` tokens, one per prime counted with multiplicity;
  /// "1" for the unit ideal.
  std::string to_string() const;

  // (norm, factor list) lexicographic; the class-representative tie-break.
  friend std::strong_ordering operator<=>(const IdealK& x, const IdealK& y);
  friend bool operator==(const IdealK& x, const IdealK& y) { return x.factors_ == y.factors_; }

 private:
  std::vector<std::pair<PrimeIdealK, int>> factors_;
  Int norm_ = 1;
};

/// x + y*omega with omega = sqrt(m) (m = 2,3 mod 4) or (1 + sqrt(m))/2 (m = 1 mod 4).
struct Element {
  Int x = 0;
  Int y = 0;
  friend auto operator<=>(const Element&, const Element&) = default;
};

struct IdealClassData {
  int h = 1;
  std::vector<IdealK> representatives;  // minimal-norm, index = class id; class 0 is principal
  std::vector<std::vector<int>> product;  // class id of representatives[i] * representatives[j]
  std::vector<int> inverse;
};

class QuadraticField {
 public:
  Int m() const { return m_; }
  Int disc() const { return disc_; }
  std::pair<int, int> signature() const { return m_ > 0 ? std::pair{2, 0} : std::pair{0, 1}; }
  bool is_real() const { return m_ > 0; }
  int num_roots_of_unity() const { return w_; }
  const std::optional<Element>& fundamental_unit() const { return unit_; }
  int class_number() const { return classes_.h; }
  double regulator() const { return regulator_; }
  const IdealClassData& classes() const { return classes_; }

  // Element arithmetic on the integral basis (1, omega).
  Int trace_omega() const { return t_; }
  Int norm_omega() const { return n_; }
  Int norm(const Element& a) const;
  Element mul(const Element& a, const Element& b) const;
  Element conj(const Element& a) const;
  /// Real embedding(s) for real fields; real and imaginary part for imaginary fields.
  std::pair<long double, long double> embed(const Element& a) const;

  int valuation(const Element& a, const PrimeIdealK& pi) const;
  /// Factorization of the principal ideal (a), a != 0.
  IdealK ideal_of(const Element& a) const;
  /// Conjugate ideal (image under the nontrivial automorphism).
  IdealK conjugate(const IdealK& I) const;
  /// A generator when I is principal. Deterministic search order.
  std::optional<Element> principal_generator(const IdealK& I) const;
  bool is_principal(const IdealK& I) const { return principal_generator(I).has_value(); }
  /// Index into classes().representatives of the class of I.
  int class_index(const IdealK& I) const;
  /// Whether a nonzero element is a square in K.
  bool is_square(const Element& a) const;

  std::string name() const;

 private:
  friend QuadraticField make_field(Int m);
  Int m_ = -1, disc_ = -4, t_ = 0, n_ = 1;
  int w_ = 2;
  std::optional<Element> unit_;
  double regulator_ = 0.0;
  IdealClassData classes_;
  Int sqrt_root(Int p, int idx) const;  // root of the minimal polynomial of omega mod p
};

/// Builds Q(sqrt m). Throws std::invalid_argument for m not squarefree, m in
/// {0, 1} or |d_K| > 10^4, and std::runtime_error ("field too large") when the
/// fundamental unit exceeds the search bound.
QuadraticField make_field(Int m);

std::vector<PrimeIdealK> split_prime(const QuadraticField& K, Int p);
/// Prime ideals of norm < X, norm-ascending.
std::vector<PrimeIdealK> primes_up_to(const QuadraticField& K, Int X);

/// Parses a comma-separated list of `p:idx` tokens ("1" or "" is the unit ideal).
IdealK parse_ideal(const QuadraticField& K, std::string_view spec);

/// A squarefree ideal with its class id.
struct ClassedIdeal {
  IdealK ideal;
  int cls = 0;
};

/// All squarefree ideals of norm < X with their classes, ordered by IdealK order.
std::vector<ClassedIdeal> squarefree_ideals_with_class(const QuadraticField& K, Int X);

/// Squarefree ideals a of norm < X; with a constraint b only those with a*b^2 principal.
std::vector<IdealK> squarefree_ideals_up_to(const QuadraticField& K, Int X,
                                            const std::optional<IdealK>& class_constraint = std::nullopt);

/// N^sf(X; c, q, d): squarefree a with Na < X, a ~ c and gcd(a, q) = d.
Int count_sf(const QuadraticField& K, Int X, const IdealK& c, const IdealK& q, const IdealK& d);
/// Same count over a precomputed enumeration (must cover norm < X).
Int count_sf(const QuadraticField& K, const std::vector<ClassedIdeal>& ideals, Int X, const IdealK& c,
             const IdealK& q, const IdealK& d);

/// prod_{pi | d} 1/(N pi + 1) * prod_{pi | q, pi not | d} N pi/(N pi + 1), exact.
boost::rational<Int> phi_qd(const IdealK& q, const IdealK& d);

double zeta_residue(const QuadraticField& K);
/// zeta_K(2) from the Euler product over rational primes below `bound`; the
/// default bound keeps the truncation error below 1e-8.
double zeta_at_2(const QuadraticField& K, Int bound = 30000000);
/// Upper bound on |log zeta_K(2) - log(partial product below bound)|.
double zeta_at_2_tail_bound(Int bound);

double mainterm_sf(const QuadraticField& K, Int X, const IdealK& q, const IdealK& d);
double mainterm_sf(const QuadraticField& K, Int X, const IdealK& q, const IdealK& d, double zeta2);

/// Representatives of O_K^x / (O_K^x)^2, starting with 1.
std::vector<Element> units_mod_squares(const QuadraticField& K);

/// c(K) with |C(K, X)| ~ c(K) X.
double density_constant(const QuadraticField& K);
double density_constant(const QuadraticField& K, double zeta2);

}  // namespace twistsel
