#include <algorithm>
#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

#include "twistsel/quadfield.hpp"

namespace twistsel {

std::string_view to_string(Splitting s) {
  switch (s) {
    case Splitting::split: return "split";
    case Splitting::inert: return "inert";
    default: return "ramified";
  }
}

std::string PrimeIdealK::to_string() const { return fmt::format("{}:{}", p, conjugate_index); }

IdealK IdealK::prime(const PrimeIdealK& pi, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  if (exponent == 0) return {};
  return from_factors({{pi, exponent}});
}

IdealK IdealK::from_factors(std::vector<std::pair<PrimeIdealK, int>> factors) {
  std::sort(factors.begin(), factors.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  IdealK out;
  for (auto& [pi, e] : factors) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    if (e == 0) continue;
    if (!out.factors_.empty() && out.factors_.back().first == pi)
      out.factors_.back().second += e;
    else
      out.factors_.emplace_back(pi, e);
  }
  for (auto& [pi, e] : out.factors_)
    for (int i = 0; i < e; ++i)
      if (__builtin_mul_overflow(out.norm_, pi.norm, &out.norm_)) throw std::overflow_error("ideal norm overflow");
  return out;
}

bool IdealK::is_squarefree() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const auto& f) { return f.second == 1; });
}

int IdealK::exponent(const PrimeIdealK& pi) const {
  for (const auto& [q, e] : factors_)
    if (q == pi) return e;
  return 0;
}

bool IdealK::divides(const IdealK& other) const {
  return std::all_of(factors_.begin(), factors_.end(), [&](const auto& f) { return other.exponent(f.first) >= f.second; });
}

IdealK IdealK::gcd(const IdealK& other) const {
  std::vector<std::pair<PrimeIdealK, int>> out;
  for (const auto& [pi, e] : factors_) {
    const int f = std::min(e, other.exponent(pi));
    if (f > 0) out.emplace_back(pi, f);
  }
  return from_factors(std::move(out));
}

IdealK IdealK::operator*(const IdealK& other) const {
  auto all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return from_factors(std::move(all));
}

std::string IdealK::to_string() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (const auto& [pi, e] : factors_)
    for (int i = 0; i < e; ++i) {
      if (!out.empty()) out += ',';
      out += pi.to_string();
    }
  return out;
}

std::strong_ordering operator<=>(const IdealK& x, const IdealK& y) {
  if (auto c = x.norm_ <=> y.norm_; c != 0) return c;
  const std::size_t n = std::min(x.factors_.size(), y.factors_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [px, ex] = x.factors_[i];
    const auto& [py, ey] = y.factors_[i];
    if (auto c = px.p <=> py.p; c != 0) return c;
    if (auto c = px.conjugate_index <=> py.conjugate_index; c != 0) return c;
    if (auto c = ex <=> ey; c != 0) return c;
  }
  return x.factors_.size() <=> y.factors_.size();
}

std::vector<PrimeIdealK> split_prime(const QuadraticField& K, Int p) {
  if (!is_prime(p)) throw std::invalid_argument(fmt::format("split_prime: {} is not prime", p));
  switch (kronecker(K.disc(), p)) {
    case 1: return {{p, Splitting::split, 0, p}, {p, Splitting::split, 1, p}};
    case -1: return {{p, Splitting::inert, 0, p * p}};
    default: return {{p, Splitting::ramified, 0, p}};
  }
}

std::vector<PrimeIdealK> primes_up_to(const QuadraticField& K, Int X) {
  std::vector<PrimeIdealK> out;
  if (X <= 2) return out;
  const auto table = sieve_primes(X);
  for (Int p : table.primes()) {
    for (const auto& pi : split_prime(K, p))
      if (pi.norm < X) out.push_back(pi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

IdealK parse_ideal(const QuadraticField& K, std::string_view spec) {
  std::vector<std::pair<PrimeIdealK, int>> factors;
  if (spec.empty() || spec == "1") return {};
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string_view token = spec.substr(pos, comma - pos);
    const std::size_t colon = token.find(':');
    Int p = 0;
    int idx = 0;
    const auto bad = [&] { return std::invalid_argument(fmt::format("bad prime token '{}' (expected p:idx)", token)); };
    if (colon == std::string_view::npos) throw bad();
    auto r1 = std::from_chars(token.data(), token.data() + colon, p);
    auto r2 = std::from_chars(token.data() + colon + 1, token.data() + token.size(), idx);
    if (r1.ec != std::errc() || r1.ptr != token.data() + colon || r2.ec != std::errc() ||
        r2.ptr != token.data() + token.size())
      throw bad();
    if (!is_prime(p)) throw std::invalid_argument(fmt::format("'{}': {} is not prime", token, p));
    const auto above = split_prime(K, p);
    if (idx < 0 || idx >= static_cast<int>(above.size()))
      throw std::invalid_argument(fmt::format("'{}': prime {} has {} ideal(s) above it in {}", token, p, above.size(), K.name()));
    factors.emplace_back(above[idx], 1);
    pos = comma + 1;
  }
  return IdealK::from_factors(std::move(factors));
}

namespace {

void extend(const std::vector<PrimeIdealK>& primes, const std::vector<int>& prime_class, const IdealClassData& cl,
            std::size_t start, Int X, std::vector<std::pair<PrimeIdealK, int>>& current, Int norm, int cls,
            std::vector<ClassedIdeal>& out) {
  out.push_back({IdealK::from_factors(current), cls});
  for (std::size_t i = start; i < primes.size(); ++i) {
    if (primes[i].norm > (X - 1) / norm) break;  // norm * N(pi) >= X
    current.emplace_back(primes[i], 1);
    extend(primes, prime_class, cl, i + 1, X, current, norm * primes[i].norm, cl.product[cls][prime_class[i]], out);
    current.pop_back();
  }
}

void check_qd(const IdealK& q, const IdealK& d) {
  if (!d.is_squarefree()) throw std::invalid_argument(fmt::format("d = {} is not squarefree", d.to_string()));
  if (!d.divides(q)) throw std::invalid_argument(fmt::format("d = {} does not divide q = {}", d.to_string(), q.to_string()));
}

}  // namespace

std::vector<ClassedIdeal> squarefree_ideals_with_class(const QuadraticField& K, Int X) {
  std::vector<ClassedIdeal> out;
  if (X <= 1) return out;
  const auto primes = primes_up_to(K, X);
  std::vector<int> prime_class(primes.size(), 0);
  if (K.class_number() > 1)
    for (std::size_t i = 0; i < primes.size(); ++i) prime_class[i] = K.class_index(IdealK::prime(primes[i]));
  std::vector<std::pair<PrimeIdealK, int>> current;
  extend(primes, prime_class, K.classes(), 0, X, current, 1, 0, out);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.ideal < y.ideal; });
  return out;
}

std::vector<IdealK> squarefree_ideals_up_to(const QuadraticField& K, Int X, const std::optional<IdealK>& class_constraint) {
  const auto& cl = K.classes();
  int target = -1;
  if (class_constraint) {
    const int b = K.class_index(*class_constraint);
    target = cl.inverse[cl.product[b][b]];
  }
  std::vector<IdealK> out;
  for (auto& [ideal, cls] : squarefree_ideals_with_class(K, X))
    if (target < 0 || cls == target) out.push_back(std::move(ideal));
  return out;
}

Int count_sf(const QuadraticField& K, const std::vector<ClassedIdeal>& ideals, Int X, const IdealK& c, const IdealK& q,
             const IdealK& d) {
  check_qd(q, d);
  const int target = K.class_index(c);
  Int count = 0;
  for (const auto& [a, cls] : ideals) {
    if (a.norm() >= X) continue;
    if (cls == target && a.gcd(q) == d) ++count;
  }
  return count;
}

Int count_sf(const QuadraticField& K, Int X, const IdealK& c, const IdealK& q, const IdealK& d) {
  check_qd(q, d);
  return count_sf(K, squarefree_ideals_with_class(K, X), X, c, q, d);
}

boost::rational<Int> phi_qd(const IdealK& q, const IdealK& d) {
  check_qd(q, d);
  boost::rational<Int> out(1);
  for (const auto& [pi, e] : q.factors()) {
    if (d.exponent(pi) > 0)
      out *= boost::rational<Int>(1, pi.norm + 1);
    else
      out *= boost::rational<Int>(pi.norm, pi.norm + 1);
  }
  return out;
}

double mainterm_sf(const QuadraticField& K, Int X, const IdealK& q, const IdealK& d, double zeta2) {
  const auto phi = phi_qd(q, d);
  const double density = zeta_residue(K) / zeta2 / K.class_number();
  return density * boost::rational_cast<double>(phi) * static_cast<double>(X);
}

double mainterm_sf(const QuadraticField& K, Int X, const IdealK& q, const IdealK& d) {
  return mainterm_sf(K, X, q, d, zeta_at_2(K));
}

double density_constant(const QuadraticField& K, double zeta2) {
  double sum_b = 0.0;
  for (const auto& b : K.classes().representatives) {
    const double nb = static_cast<double>(b.norm());
    sum_b += 1.0 / (nb * nb);
  }
  return static_cast<double>(units_mod_squares(K).size()) * zeta_residue(K) / zeta2 / K.class_number() * sum_b;
}

double density_constant(const QuadraticField& K) { return density_constant(K, zeta_at_2(K)); }

}  // namespace twistsel
