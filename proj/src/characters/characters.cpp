#include "twistsel/characters.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace twistsel {

double AdditiveFunctionSpec::at(const PrimeRef& pi) const {
  const double v = value_at_prime(pi);
  if (bounded_01 && !(v >= 0.0 && v <= 1.0))
    throw std::domain_error(fmt::format("additive function {} has value {} at prime {} outside [0, 1]", name, v, pi.p));
  return v;
}

AdditiveFunctionSpec omega_function(const QuadraticField* field) {
  return {field, [](const PrimeRef&) { return 1.0; }, true, "omega"};
}

QuadraticCharacter QuadraticCharacter::rational(SquarefreeInt d) {
  QuadraticCharacter chi;
  chi.d_ = d;
  return chi;
}

QuadraticCharacter QuadraticCharacter::over_field(const QuadraticField& K, IdealK conductor, int unit_index,
                                                  IdealK class_component) {
  if (!conductor.is_squarefree()) throw std::invalid_argument("character conductor must be squarefree");
  QuadraticCharacter chi;
  chi.field_ = &K;
  chi.conductor_ = std::move(conductor);
  chi.unit_index_ = unit_index;
  chi.class_component_ = std::move(class_component);
  return chi;
}

int QuadraticCharacter::value(Int p) const {
  if (!over_q()) throw std::logic_error("QuadraticCharacter::value(p) is defined over Q only");
  const Int d = d_.value();
  const Int disc = ((d % 4) + 4) % 4 == 1 ? d : 4 * d;
  return kronecker(disc, p);
}

Element QuadraticCharacter::defining_element() const {
  if (over_q()) return {d_.value(), 0};
  const QuadraticField& K = *field_;
  const auto g = K.principal_generator(conductor_ * class_component_.squared());
  if (!g) throw std::logic_error("character triple with non-principal a*b^2");
  return K.mul(units_mod_squares(K)[unit_index_], *g);
}

std::string QuadraticCharacter::to_string() const {
  if (over_q()) return fmt::format("chi_{}", d_.value());
  return fmt::format("chi[{}; b={}; eps={}]", conductor_.to_string(), class_component_.to_string(), unit_index_);
}

bool operator==(const QuadraticCharacter& x, const QuadraticCharacter& y) {
  if (x.field_ != y.field_) return false;
  if (x.over_q()) return x.d_ == y.d_;
  return x.conductor_ == y.conductor_ && x.unit_index_ == y.unit_index_ && x.class_component_ == y.class_component_;
}

QuadraticCharacter char_from_element(Int d) {
  if (d == 0) throw std::invalid_argument("char_from_element: d must be nonzero");
  return QuadraticCharacter::rational(squarefree_part(d));
}

QuadraticCharacter char_from_element(const QuadraticField& K, const Element& d) {
  if (d.x == 0 && d.y == 0) throw std::invalid_argument("char_from_element: d must be nonzero");
  // (d) = a c^2 with a squarefree; b is the class representative of c.
  std::vector<std::pair<PrimeIdealK, int>> odd, half;
  const IdealK full = K.ideal_of(d);
  for (const auto& [pi, e] : full.factors()) {
    if (e & 1) odd.emplace_back(pi, 1);
    if (e >= 2) half.emplace_back(pi, e / 2);
  }
  IdealK a = IdealK::from_factors(std::move(odd));
  const IdealK c = IdealK::from_factors(std::move(half));
  IdealK b = K.classes().representatives[K.class_index(c)];
  const auto g = K.principal_generator(a * b.squared());
  if (!g) throw std::logic_error("char_from_element: a*b^2 not principal");
  const auto units = units_mod_squares(K);
  for (std::size_t i = 0; i < units.size(); ++i) {
    // d / (eps g) is a square iff d * conj(eps g) * N(eps g) is.
    const Element eg = K.mul(units[i], *g);
    const Int n = K.norm(eg);
    const Element w = K.mul(d, K.conj(eg));
    if (K.is_square(K.mul(w, Element{n, 0}))) return QuadraticCharacter::over_field(K, std::move(a), static_cast<int>(i), std::move(b));
  }
  throw std::logic_error(fmt::format("char_from_element: no unit class matches in {}", K.name()));
}

std::vector<QuadraticCharacter> enumerate_characters(Int X) {
  std::vector<QuadraticCharacter> out;
  const auto ds = sieve_squarefree(X);
  out.reserve(ds.size());
  for (auto d : ds) out.push_back(QuadraticCharacter::rational(d));
  return out;
}

std::vector<QuadraticCharacter> enumerate_characters(const QuadraticField& K, Int X) {
  if (X < 2) throw std::invalid_argument("enumerate_characters: X must be >= 2");
  const auto& cl = K.classes();
  const auto ideals = squarefree_ideals_with_class(K, X);
  const int units = static_cast<int>(units_mod_squares(K).size());
  std::vector<QuadraticCharacter> out;
  for (int j = 0; j < cl.h; ++j) {
    const IdealK& b = cl.representatives[j];
    const Int nb2 = b.norm() * b.norm();
    if (nb2 >= X) continue;
    const int target = cl.inverse[cl.product[j][j]];
    for (const auto& [a, cls] : ideals) {
      if (cls != target || a.norm() > (X - 1) / nb2) continue;
      for (int e = 0; e < units; ++e) out.push_back(QuadraticCharacter::over_field(K, a, e, b));
    }
  }
  return out;
}

std::vector<Int> ramified_primes(const QuadraticCharacter& chi) {
  if (!chi.over_q()) throw std::logic_error("ramified_primes: use ramified_prime_ideals over a quadratic field");
  std::vector<Int> out;
  for (auto [p, e] : factorize(chi.d().value()))
    if (p != 2) out.push_back(p);
  return out;
}

std::vector<PrimeIdealK> ramified_prime_ideals(const QuadraticCharacter& chi) {
  if (chi.over_q()) throw std::logic_error("ramified_prime_ideals: character is over Q");
  std::vector<PrimeIdealK> out;
  for (const auto& [pi, e] : chi.conductor().factors()) out.push_back(pi);
  return out;
}

double eval_additive(const AdditiveFunctionSpec& f, const QuadraticCharacter& chi) {
  if (f.field != chi.base_field()) throw std::invalid_argument("additive function and character live over different fields");
  double sum = 0.0;
  if (chi.over_q()) {
    for (auto [p, e] : factorize(chi.d().value())) sum += f.at(PrimeRef::rational(p));
  } else {
    for (const auto& [pi, e] : chi.conductor().factors()) sum += f.at(PrimeRef::of(pi));
  }
  return sum;
}

int residue_symbol(const QuadraticField& K, const Element& c, const PrimeIdealK& pi) {
  const Int p = pi.p;
  if (p == 2) throw std::invalid_argument("residue_symbol: primes above 2 are excluded");
  const auto reduce = [p](Int v) { return ((v % p) + p) % p; };
  if (pi.splitting == Splitting::inert) {
    // x^((p^2-1)/2) = N(x)^((p-1)/2) on F_{p^2}
    return kronecker(reduce(K.norm(c)), p);
  }
  // O_K / pi = F_p with omega -> a root of X^2 - t X + n.
  Int rho;
  if (pi.splitting == Splitting::ramified) {
    rho = mulmod(reduce(K.trace_omega()), (p + 1) / 2, p);
  } else {
    const Int s = sqrtmod(reduce(K.disc()), p);
    Int r0 = mulmod(reduce(K.trace_omega() + s), (p + 1) / 2, p);
    Int r1 = mulmod(reduce(K.trace_omega() - s), (p + 1) / 2, p);
    if (r0 > r1) std::swap(r0, r1);
    rho = pi.conjugate_index == 0 ? r0 : r1;
  }
  return kronecker(reduce(reduce(c.x) + mulmod(reduce(c.y), rho, p)), p);
}

}  // namespace twistsel
