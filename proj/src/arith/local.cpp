#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "twistsel/arith.hpp"

namespace twistsel {

namespace {

Int unit_part(Int n, Int p, int& v) {
  v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return n;
}

Int mod8(Int n) { return ((n % 8) + 8) % 8; }

}  // namespace

std::vector<SquareClassLocal> local_square_classes(Place place) {
  if (place.is_real()) return {{place, 1}, {place, -1}};
  const Int p = place.prime();
  if (p == 2) {
    std::vector<SquareClassLocal> out;
    for (Int r : {1, -1, 2, -2, 5, -5, 10, -10}) out.push_back({place, r});
    return out;
  }
  const Int u = least_nonresidue(p);
  return {{place, 1}, {place, u}, {place, p}, {place, u * p}};
}

Int local_class_representative(Place place, Int n) {
  if (n == 0) throw std::invalid_argument("square class of zero");
  if (place.is_real()) return n < 0 ? -1 : 1;
  const Int p = place.prime();
  int v;
  const Int u = unit_part(n, p, v);
  const Int pv = (v & 1) ? p : 1;
  if (p == 2) {
    switch (mod8(u)) {
      case 1: return pv;
      case 3: return -5 * pv;
      case 5: return 5 * pv;
      default: return -pv;
    }
  }
  return kronecker(u, p) == 1 ? pv : least_nonresidue(p) * pv;
}

unsigned square_class_bits(Place place, Int n) {
  if (n == 0) throw std::invalid_argument("square class of zero");
  if (place.is_real()) return n < 0 ? 1u : 0u;
  const Int p = place.prime();
  int v;
  const Int u = unit_part(n, p, v);
  unsigned bits = static_cast<unsigned>(v & 1);
  if (p == 2) {
    const Int r = mod8(u);
    if (r % 4 == 3) bits |= 2u;
    if (r == 3 || r == 5) bits |= 4u;
    return bits;
  }
  if (kronecker(u, p) == -1) bits |= 2u;
  return bits;
}

int square_class_rank(Place place) {
  if (place.is_real()) return 1;
  return place.prime() == 2 ? 3 : 2;
}

namespace {

using Poly = std::array<BigInt, 5>;  // coefficient of t^i at index i
constexpr int kMaxDepth = 256;
constexpr Int kEnumerateBelow = 67;

BigInt eval(const Poly& h, const BigInt& t) {
  BigInt acc = h[4];
  for (int i = 3; i >= 0; --i) acc = acc * t + h[i];
  return acc;
}

// Coefficients of h(c + scale*s) as a polynomial in s.
Poly taylor_shift(const Poly& h, const BigInt& c, const BigInt& scale) {
  Poly g = h;
  // Horner-style shift by c.
  for (int i = 0; i < 4; ++i)
    for (int j = 3; j >= i; --j) g[j] += c * g[j + 1];
  BigInt s = 1;
  for (int j = 0; j < 5; ++j) {
    g[j] *= s;
    s *= scale;
  }
  return g;
}

// ----- polynomials over F_p (low-to-high, trimmed) -----
using ModPoly = std::vector<Int>;

void trim(ModPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

ModPoly poly_mod(ModPoly a, const ModPoly& b, Int p) {
  trim(a);
  const Int inv = invmod(b.back(), p);
  while (a.size() >= b.size()) {
    const Int q = mulmod(a.back(), inv, p);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = ((a[shift + i] - mulmod(q, b[i], p)) % p + p) % p;
    trim(a);
  }
  return a;
}

ModPoly poly_divexact(ModPoly a, const ModPoly& b, Int p) {
  trim(a);
  const Int inv = invmod(b.back(), p);
  ModPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  while (a.size() >= b.size()) {
    const Int c = mulmod(a.back(), inv, p);
    const std::size_t shift = a.size() - b.size();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = ((a[shift + i] - mulmod(c, b[i], p)) % p + p) % p;
    trim(a);
  }
  return q;
}

ModPoly poly_mulmod(const ModPoly& a, const ModPoly& b, const ModPoly& f, Int p) {
  if (a.empty() || b.empty()) return {};
  ModPoly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + mulmod(a[i], b[j], p)) % p;
  return poly_mod(std::move(c), f, p);
}

ModPoly poly_powmod(ModPoly base, Int e, const ModPoly& f, Int p) {
  ModPoly result{1};
  base = poly_mod(std::move(base), f, p);
  while (e > 0) {
    if (e & 1) result = poly_mulmod(result, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return result;
}

ModPoly poly_gcd(ModPoly a, ModPoly b, Int p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    ModPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const Int inv = invmod(a.back(), p);
    for (auto& c : a) c = mulmod(c, inv, p);
  }
  return a;
}

ModPoly poly_sub_x(ModPoly a, Int shift, Int p) {
  // a(x) - (x + shift)
  a.resize(std::max<std::size_t>(a.size(), 2), 0);
  a[0] = ((a[0] - shift) % p + p) % p;
  a[1] = (a[1] - 1 + p) % p;
  trim(a);
  return a;
}

void split_linear(const ModPoly& g, Int p, std::vector<Int>& roots) {
  const std::size_t deg = g.size() - 1;
  if (deg == 0) return;
  if (deg == 1) {
    roots.push_back(mulmod(p - g[0], invmod(g[1], p), p));
    return;
  }
  for (Int a = 1;; ++a) {
    // gcd(g, (x + a)^((p-1)/2) - 1)
    ModPoly h = poly_powmod(ModPoly{a % p, 1}, (p - 1) / 2, g, p);
    if (h.empty()) h = {0};
    h[0] = (h[0] - 1 + p) % p;
    trim(h);
    ModPoly d = poly_gcd(g, h, p);
    const std::size_t dd = d.empty() ? 0 : d.size() - 1;
    if (dd > 0 && dd < deg) {
      split_linear(d, p, roots);
      split_linear(poly_divexact(g, d, p), p, roots);
      return;
    }
  }
}

// Distinct roots in F_p of a nonzero polynomial.
std::vector<Int> roots_mod_p(ModPoly f, Int p) {
  trim(f);
  std::vector<Int> roots;
  if (f.size() <= 1) return roots;
  if (p < kEnumerateBelow) {
    for (Int r = 0; r < p; ++r) {
      Int acc = 0;
      for (std::size_t i = f.size(); i-- > 0;) acc = (mulmod(acc, r, p) + f[i]) % p;
      if (acc == 0) roots.push_back(r);
    }
    return roots;
  }
  const Int inv = invmod(f.back(), p);
  for (auto& c : f) c = mulmod(c, inv, p);
  ModPoly xp = poly_powmod(ModPoly{0, 1}, p, f, p);
  ModPoly g = poly_gcd(f, poly_sub_x(xp, 0, p), p);
  if (g.size() > 1) split_linear(g, p, roots);
  std::sort(roots.begin(), roots.end());
  return roots;
}

// f = c * q(x)^2 over F_p for some polynomial q.
bool is_constant_times_square(const ModPoly& f, Int p) {
  const std::size_t n = f.size() - 1;
  if (n == 0) return true;
  if (n % 2 == 1) return false;
  const Int inv = invmod(f.back(), p);
  auto c = [&](std::size_t i) { return mulmod(f[i], inv, p); };
  const Int half = invmod(2, p);
  if (n == 2) {
    const Int disc = ((mulmod(c(1), c(1), p) - 4 * c(0)) % p + p) % p;
    return disc == 0;
  }
  // monic quartic = (x^2 + alpha x + beta)^2
  const Int alpha = mulmod(c(3), half, p);
  const Int beta = mulmod(((c(2) - mulmod(alpha, alpha, p)) % p + p) % p, half, p);
  return mulmod(2, mulmod(alpha, beta, p), p) == c(1) && mulmod(beta, beta, p) == c(0);
}

// Is there t in Z_p with p^parity * h(t) a square in Q_p (zero allowed)?
bool odd_solvable(Poly h, int parity, Int p, int depth) {
  if (depth > kMaxDepth) throw std::runtime_error("torsor search exceeded depth bound");
  int m = -1;
  for (const auto& c : h) {
    if (c == 0) continue;
    const int v = valuation(c, p);
    m = (m < 0) ? v : std::min(m, v);
  }
  if (m < 0) return true;  // identically zero
  if (m > 0) {
    BigInt pm = boost::multiprecision::pow(BigInt(p), m);
    for (auto& c : h) c /= pm;
    parity ^= (m & 1);
  }
  ModPoly bar(5);
  for (int i = 0; i < 5; ++i) {
    BigInt r = h[i] % p;
    if (r < 0) r += p;
    bar[i] = static_cast<Int>(r);
  }
  trim(bar);

  if (parity == 0) {
    if (p < kEnumerateBelow) {
      for (Int r = 0; r < p; ++r) {
        Int acc = 0;
        for (std::size_t i = bar.size(); i-- > 0;) acc = (mulmod(acc, r, p) + bar[i]) % p;
        if (acc != 0 && kronecker(acc, p) == 1) return true;
      }
    } else if (bar.size() == 1) {
      if (kronecker(bar[0], p) == 1) return true;
    } else if (!is_constant_times_square(bar, p)) {
      // Character-sum bound: a quartic that is not c*q^2 takes a nonzero
      // square value once p > 2*4 + 3*sqrt(p).
      return true;
    } else if (kronecker(bar.back(), p) == 1) {
      return true;  // c is a square and q has non-roots
    }
  }
  const BigInt bp = p;
  for (Int r : roots_mod_p(bar, p)) {
    if (odd_solvable(taylor_shift(h, BigInt(r), bp), parity, p, depth + 1)) return true;
  }
  return false;
}

bool two_adic_square(const BigInt& x) {
  if (x == 0) return true;
  const int v = valuation(x, 2);
  if (v & 1) return false;
  const BigInt u = x >> v;
  BigInt r = u % 8;
  if (r < 0) r += 8;
  return r == 1;
}

// Is there x in c + 2^k Z_2 with h(x) a square in Q_2?
bool two_adic_solvable(const Poly& h, const BigInt& c, int k, int depth) {
  if (depth > kMaxDepth) throw std::runtime_error("torsor search exceeded depth bound");
  const BigInt hc = eval(h, c);
  if (two_adic_square(hc)) return true;
  const int v = valuation(hc, 2);
  // h(c + 2^k s) - h(c) has valuation >= m for all s.
  const Poly t = taylor_shift(h, c, BigInt(1));
  int m = -1;
  for (int j = 1; j < 5; ++j) {
    if (t[j] == 0) continue;
    const int vj = valuation(t[j], 2) + j * k;
    m = (m < 0) ? vj : std::min(m, vj);
  }
  if (m < 0 || (m > v && ((v & 1) || m - v >= 3))) return false;
  const BigInt step = BigInt(1) << k;
  return two_adic_solvable(h, c, k + 1, depth + 1) || two_adic_solvable(h, c + step, k + 1, depth + 1);
}

bool real_solvable(const BigInt& a, const BigInt& b, const BigInt& delta) {
  if (delta > 0) return true;
  const BigInt disc = a * a - 4 * b;
  if (disc < 0) return true;
  // delta < 0 and a^2 - 4b > 0: need the quadratic in z^2 to dip to <= 0.
  return a * delta > 0 && b > 0;
}

}  // namespace

bool torsor_solvable(const BigInt& a, const BigInt& b, const BigInt& delta, Place place) {
  const BigInt disc = a * a - 4 * b;
  if (b == 0 || disc == 0) throw std::invalid_argument("torsor_solvable: singular curve (b*(a^2-4b) = 0)");
  if (delta == 0) throw std::invalid_argument("torsor_solvable: delta must be nonzero");
  if (place.is_real()) return real_solvable(a, b, delta);
  const Int p = place.prime();
  const BigInt d2 = delta * delta;
  // Chart (x : 1), x in Z_p, and chart (1 : p z), z in Z_p; both scaled by delta.
  const Poly chart_a{delta * disc, 0, -2 * a * d2, 0, delta * d2};
  const BigInt p2 = BigInt(p) * p;
  const Poly chart_b{delta * d2, 0, -2 * a * d2 * p2, 0, delta * disc * p2 * p2};
  if (p == 2) return two_adic_solvable(chart_a, 0, 0, 0) || two_adic_solvable(chart_b, 0, 0, 0);
  return odd_solvable(chart_a, 0, p, 0) || odd_solvable(chart_b, 0, p, 0);
}

bool torsor_locally_solvable(Int a, Int b, const SquareClassLocal& delta, Place place) {
  if (delta.place != place)
    throw std::invalid_argument(fmt::format("square class for place {} used at place {}", delta.place.to_string(),
                                            place.to_string()));
  return torsor_solvable(BigInt(a), BigInt(b), BigInt(delta.representative), place);
}

}  // namespace twistsel
