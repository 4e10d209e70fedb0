#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "twistsel/quadfield.hpp"

namespace twistsel {

namespace {

constexpr Int kMaxAbsDisc = 10000;
constexpr Int kUnitSearchBound = 10000000;

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("quadratic field arithmetic overflow");
  return r;
}

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("quadratic field arithmetic overflow");
  return r;
}

int valuation_or_inf(Int n, Int p) { return n == 0 ? std::numeric_limits<int>::max() : valuation(n, p); }

}  // namespace

Int QuadraticField::norm(const Element& a) const {
  // x^2 + t x y + n y^2
  return checked_add(checked_add(checked_mul(a.x, a.x), checked_mul(t_, checked_mul(a.x, a.y))),
                     checked_mul(n_, checked_mul(a.y, a.y)));
}

Element QuadraticField::mul(const Element& a, const Element& b) const {
  // omega^2 = t omega - n
  const Int yy = checked_mul(a.y, b.y);
  return {checked_add(checked_mul(a.x, b.x), -checked_mul(n_, yy)),
          checked_add(checked_add(checked_mul(a.x, b.y), checked_mul(a.y, b.x)), checked_mul(t_, yy))};
}

Element QuadraticField::conj(const Element& a) const { return {a.x + t_ * a.y, -a.y}; }

std::pair<long double, long double> QuadraticField::embed(const Element& a) const {
  const long double root = std::sqrt(static_cast<long double>(std::abs(disc_)));
  const long double base = a.x + a.y * static_cast<long double>(t_) / 2;
  if (disc_ > 0) return {base + a.y * root / 2, base - a.y * root / 2};
  return {base, a.y * root / 2};
}

std::string QuadraticField::name() const { return fmt::format("Q(sqrt({}))", m_); }

Int QuadraticField::sqrt_root(Int p, int idx) const {
  // Roots of X^2 - t X + n mod p; p splits, so there are two.
  Int r0, r1;
  if (p == 2) {
    r0 = 0;
    r1 = 1;
  } else {
    const Int s = sqrtmod(disc_, p);
    const Int inv2 = (p + 1) / 2;
    r0 = mulmod((t_ + s) % p + p, inv2, p);
    r1 = mulmod(((t_ - s) % p + p) % p, inv2, p);
    if (r0 > r1) std::swap(r0, r1);
  }
  return idx == 0 ? r0 : r1;
}

int QuadraticField::valuation(const Element& a, const PrimeIdealK& pi) const {
  if (a.x == 0 && a.y == 0) throw std::invalid_argument("valuation of zero element");
  const Int p = pi.p;
  switch (pi.splitting) {
    case Splitting::inert: return std::min(valuation_or_inf(a.x, p), valuation_or_inf(a.y, p));
    case Splitting::ramified: return twistsel::valuation(norm(a), p);
    case Splitting::split: break;
  }
  const int k = twistsel::valuation(norm(a), p);
  if (k == 0) return 0;
  // Lift the root of omega's minimal polynomial to precision p^(k+1); then
  // v_pi(x + y omega) = v_p(x + y rho).
  BigInt mod = p, rho = sqrt_root(p, pi.conjugate_index);
  const BigInt bp = p;
  for (int j = 1; j <= k; ++j) {
    mod *= bp;
    const BigInt f = rho * rho - t_ * rho + n_;
    BigInt deriv = (2 * rho - t_) % bp;
    if (deriv < 0) deriv += bp;
    const Int inv = invmod(static_cast<Int>(deriv), p);
    // Newton step: the correction f / f' is divisible by p^j.
    rho = (rho - f * inv) % mod;
    if (rho < 0) rho += mod;
  }
  BigInt value = (BigInt(a.x) + BigInt(a.y) * rho) % mod;
  if (value == 0) return k;
  return std::min(k, twistsel::valuation(value, p));
}

IdealK QuadraticField::ideal_of(const Element& a) const {
  const Int n = norm(a);
  if (n == 0) throw std::invalid_argument("ideal_of: zero element");
  std::vector<std::pair<PrimeIdealK, int>> factors;
  for (auto [p, e] : factorize(n)) {
    for (const auto& pi : split_prime(*this, p)) {
      const int v = valuation(a, pi);
      if (v > 0) factors.emplace_back(pi, v);
    }
  }
  return IdealK::from_factors(std::move(factors));
}

IdealK QuadraticField::conjugate(const IdealK& I) const {
  auto factors = I.factors();
  for (auto& [pi, e] : factors)
    if (pi.splitting == Splitting::split) pi.conjugate_index ^= 1;
  return IdealK::from_factors(std::move(factors));
}

std::optional<Element> QuadraticField::principal_generator(const IdealK& I) const {
  const Int N = I.norm();
  const Int d = disc_;
  // 4 N(x + y omega) = s^2 - d y^2 with s = 2x + t y.
  Int ymax;
  if (d < 0) {
    ymax = isqrt(4 * N / (-d));
  } else {
    // Some generator has both embeddings at most sqrt(N * eps).
    const auto [e1, e2] = embed(*unit_);
    const long double eps = std::max(std::abs(e1), std::abs(e2));
    ymax = static_cast<Int>(2 * std::sqrt(static_cast<long double>(N) * eps / d)) + 1;
  }
  auto contained = [&](const Element& a) {
    for (const auto& [pi, e] : I.factors())
      if (valuation(a, pi) < e) return false;
    return true;
  };
  std::vector<Int> targets{N};
  if (d > 0) targets.push_back(-N);
  for (Int y = 0; y <= ymax; ++y) {
    for (Int target : targets) {
      const Int s2 = checked_add(checked_mul(4, target), checked_mul(d, checked_mul(y, y)));
      if (s2 < 0 || !is_perfect_square(s2)) continue;
      const Int s = isqrt(s2);
      for (Int sign : {1, -1}) {
        if (sign < 0 && s == 0) continue;
        const Int sx = sign * s - t_ * y;
        if (sx % 2 != 0) continue;
        const Element a{sx / 2, y};
        if (y == 0 && a.x < 0) continue;
        if (contained(a)) return a;
      }
    }
  }
  return std::nullopt;
}

int QuadraticField::class_index(const IdealK& I) const {
  if (classes_.h == 1) return 0;
  for (int i = 0; i < classes_.h; ++i)
    if (is_principal(I * conjugate(classes_.representatives[i]))) return i;
  throw std::logic_error(fmt::format("ideal {} matches no class representative in {}", I.to_string(), name()));
}

bool QuadraticField::is_square(const Element& a) const {
  const Int n = norm(a);
  if (n == 0) throw std::invalid_argument("is_square: zero element");
  if (!is_perfect_square(n)) return false;
  const long double root = std::sqrt(static_cast<long double>(std::abs(disc_)));
  auto check = [&](long double u, long double v) {
    const Element b{static_cast<Int>(std::llround(u)), static_cast<Int>(std::llround(v))};
    return mul(b, b) == a;
  };
  const auto [e1, e2] = embed(a);
  if (disc_ < 0) {
    // complex square root of e1 + i e2; omega has imaginary part root / 2
    const long double r = std::hypot(e1, e2);
    const long double re = std::sqrt((r + e1) / 2);
    const long double im = std::copysign(std::sqrt(std::max<long double>(0, (r - e1) / 2)), e2);
    const long double v = 2 * im / root;
    return check(re - v * t_ / 2, v);
  }
  if (e1 < 0 || e2 < 0) return false;
  const long double b1 = std::sqrt(e1);
  for (long double b2 : {std::sqrt(e2), -std::sqrt(e2)}) {
    const long double v = (b1 - b2) / root;
    if (check(b1 - v * (t_ + root) / 2, v)) return true;
  }
  return false;
}

std::vector<Element> units_mod_squares(const QuadraticField& K) {
  if (K.is_real()) {
    const Element e = *K.fundamental_unit();
    return {{1, 0}, {-1, 0}, e, {-e.x, -e.y}};
  }
  if (K.m() == -1) return {{1, 0}, {0, 1}};
  return {{1, 0}, {-1, 0}};
}

namespace {

// All integral ideals of norm <= bound, in IdealK order.
std::vector<IdealK> ideals_up_to_norm(const QuadraticField& K, Int bound) {
  std::vector<PrimeIdealK> primes = primes_up_to(K, bound + 1);
  std::vector<IdealK> out;
  std::vector<std::pair<PrimeIdealK, int>> current;
  auto rec = [&](auto&& self, std::size_t start, Int norm) -> void {
    out.push_back(IdealK::from_factors(current));
    for (std::size_t i = start; i < primes.size(); ++i) {
      if (primes[i].norm > bound / norm) break;
      Int nn = norm;
      for (int e = 1; primes[i].norm <= bound / nn; ++e) {
        nn *= primes[i].norm;
        current.emplace_back(primes[i], e);
        self(self, i + 1, nn);
        current.pop_back();
      }
    }
  };
  rec(rec, 0, 1);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

QuadraticField make_field(Int m) {
  if (m == 0 || m == 1 || !is_squarefree(m))
    throw std::invalid_argument(fmt::format("make_field: m = {} must be squarefree and not 0 or 1", m));
  QuadraticField K;
  K.m_ = m;
  const bool one_mod_four = ((m % 4) + 4) % 4 == 1;
  K.disc_ = one_mod_four ? m : 4 * m;
  if (std::abs(K.disc_) > kMaxAbsDisc)
    throw std::invalid_argument(fmt::format("make_field: |d_K| = {} exceeds {}", std::abs(K.disc_), kMaxAbsDisc));
  K.t_ = one_mod_four ? 1 : 0;
  K.n_ = one_mod_four ? (1 - m) / 4 : -m;
  K.w_ = m == -1 ? 4 : (m == -3 ? 6 : 2);

  if (m > 0) {
    // Least y > 0 with x^2 - m y^2 = +-k, k = 4 (m = 1 mod 4) or 1.
    const Int k = one_mod_four ? 4 : 1;
    for (Int y = 1; y <= kUnitSearchBound && !K.unit_; ++y) {
      const Int my2 = checked_mul(m, checked_mul(y, y));
      for (Int target : {my2 - k, my2 + k}) {
        if (target <= 0 || !is_perfect_square(target)) continue;
        const Int x = isqrt(target);
        K.unit_ = one_mod_four ? Element{(x - y) / 2, y} : Element{x, y};
        K.regulator_ = static_cast<double>(
            std::log((static_cast<long double>(x) + y * std::sqrt(static_cast<long double>(m))) / (one_mod_four ? 2 : 1)));
        break;
      }
    }
    if (!K.unit_)
      throw std::runtime_error(fmt::format("field too large: fundamental unit of Q(sqrt({})) beyond search bound", m));
  }

  // Class group from all ideals below the Minkowski bound.
  const long double root = std::sqrt(static_cast<long double>(std::abs(K.disc_)));
  const Int minkowski = static_cast<Int>(m > 0 ? root / 2 : 2 * root / std::numbers::pi_v<long double>);
  auto& cl = K.classes_;
  cl.representatives = {IdealK{}};
  cl.h = 1;
  for (const auto& I : ideals_up_to_norm(K, std::max<Int>(minkowski, 1))) {
    bool known = false;
    for (const auto& R : cl.representatives)
      if (K.is_principal(I * K.conjugate(R))) {
        known = true;
        break;
      }
    if (!known) cl.representatives.push_back(I);
  }
  cl.h = static_cast<int>(cl.representatives.size());
  cl.product.assign(cl.h, std::vector<int>(cl.h, 0));
  cl.inverse.assign(cl.h, 0);
  for (int i = 0; i < cl.h; ++i) {
    cl.inverse[i] = K.class_index(K.conjugate(cl.representatives[i]));
    for (int j = 0; j < cl.h; ++j) cl.product[i][j] = K.class_index(cl.representatives[i] * cl.representatives[j]);
  }
  return K;
}

}  // namespace twistsel
