#pragma once

// Quadratic characters of Q and of quadratic fields, indexed by their
// squarefree conductor ideal, and additive functions evaluated on them.

#include <functional>
#include <string>
#include <vector>

#include "twistsel/arith.hpp"
#include "twistsel/quadfield.hpp"

namespace twistsel {

/// A prime of the base field: over Q index 0 and norm p; over K the prime
/// ideal's conjugate index and norm.
struct PrimeRef {
  Int p = 0;
  int index = 0;
  Int norm = 0;

  static PrimeRef rational(Int p) { return {p, 0, p}; }
  static PrimeRef of(const PrimeIdealK& pi) { return {pi.p, pi.conjugate_index, pi.norm}; }
};

struct AdditiveFunctionSpec {
  const QuadraticField* field = nullptr;  // nullptr: Q
  std::function<double(const PrimeRef&)> value_at_prime;
  bool bounded_01 = false;
  std::string name;

  /// f(pi); throws std::domain_error when bounded_01 is set and the value
  /// leaves [0, 1].
  double at(const PrimeRef& pi) const;
};

/// f(pi) = 1, so f(chi) counts the primes dividing the conductor.
AdditiveFunctionSpec omega_function(const QuadraticField* field = nullptr);

class QuadraticCharacter {
 public:
  QuadraticCharacter() = default;
  static QuadraticCharacter rational(SquarefreeInt d);
  static QuadraticCharacter over_field(const QuadraticField& K, IdealK conductor, int unit_index, IdealK class_component);

  const QuadraticField* base_field() const { return field_; }
  bool over_q() const { return field_ == nullptr; }
  /// Signed squarefree d (over Q).
  SquarefreeInt d() const { return d_; }
  /// D_chi as an ideal (over K).
  const IdealK& conductor() const { return conductor_; }
  int unit_index() const { return unit_index_; }
  const IdealK& class_component() const { return class_component_; }

  /// chi(p) over Q, the Kronecker symbol of the discriminant of Q(sqrt d).
  int value(Int p) const;
  /// A defining element d with chi = chi_d (over K: unit times the canonical
  /// generator of conductor * class_component^2).
  Element defining_element() const;

  std::string to_string() const;
  friend bool operator==(const QuadraticCharacter& x, const QuadraticCharacter& y);

 private:
  const QuadraticField* field_ = nullptr;
  SquarefreeInt d_;
  IdealK conductor_;
  int unit_index_ = 0;
  IdealK class_component_;
};

/// chi_d over Q (d != 0, reduced to its squarefree part).
QuadraticCharacter char_from_element(Int d);
/// chi_d over K for a nonzero element d of O_K.
QuadraticCharacter char_from_element(const QuadraticField& K, const Element& d);

/// C(Q, X): one character per signed squarefree 0 < |d| < X, ordered by |d| then sign.
std::vector<QuadraticCharacter> enumerate_characters(Int X);
/// C(K, X) via triples (b, a, eps) with N(a b^2) < X, ordered by (class of b, a, eps).
std::vector<QuadraticCharacter> enumerate_characters(const QuadraticField& K, Int X);

/// Odd rational primes dividing d (over Q).
std::vector<Int> ramified_primes(const QuadraticCharacter& chi);
/// Prime ideals dividing D_chi (over K).
std::vector<PrimeIdealK> ramified_prime_ideals(const QuadraticCharacter& chi);

/// f(chi) = sum of f(pi) over pi | D_chi.
double eval_additive(const AdditiveFunctionSpec& f, const QuadraticCharacter& chi);

/// Quadratic residue symbol (c / pi) for pi not dividing 2; 0 when pi | c.
int residue_symbol(const QuadraticField& K, const Element& c, const PrimeIdealK& pi);

}  // namespace twistsel
