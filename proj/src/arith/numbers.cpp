#include "twistsel/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <fmt/format.h>

namespace twistsel {

Place Place::at_prime(Int p) {
  if (p < 2 || !is_prime(p)) throw std::invalid_argument(fmt::format("not a prime place: {}", p));
  return Place{p};
}

std::string Place::to_string() const {
  return is_real() ? std::string("inf") : std::to_string(p_);
}

bool PrimeTable::contains(Int n) const {
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

PrimeTable sieve_primes(Int bound) {
  if (bound < 2) throw std::invalid_argument("sieve_primes: bound must be >= 2");
  std::vector<bool> composite(static_cast<std::size_t>(bound), false);
  std::vector<Int> primes;
  primes.reserve(static_cast<std::size_t>(1.3 * bound / std::max(1.0, std::log(static_cast<double>(bound)))) + 8);
  for (Int i = 2; i < bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    if (i <= (bound - 1) / i) {
      for (Int j = i * i; j < bound; j += i) composite[j] = true;
    }
  }
  return PrimeTable(bound, std::move(primes));
}

FactorSieve::FactorSieve(Int bound) : spf_(static_cast<std::size_t>(std::max<Int>(bound, 2)), 0) {
  const Int n = static_cast<Int>(spf_.size());
  for (Int i = 2; i < n; ++i) {
    if (spf_[i] != 0) continue;
    spf_[i] = static_cast<std::int32_t>(i);
    if (i <= (n - 1) / i) {
      for (Int j = i * i; j < n; j += i)
        if (spf_[j] == 0) spf_[j] = static_cast<std::int32_t>(i);
    }
  }
}

std::vector<std::pair<Int, int>> FactorSieve::factor(Int n) const {
  n = n < 0 ? -n : n;
  if (n >= bound()) return factorize(n);
  std::vector<std::pair<Int, int>> out;
  while (n > 1) {
    const Int p = spf_[n];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  return out;
}

int kronecker(Int a, Int n) {
  if (n == 0) throw std::invalid_argument("kronecker: n must be nonzero");
  int result = 1;
  std::uint64_t m;
  if (n < 0) {
    m = static_cast<std::uint64_t>(-(n + 1)) + 1;
    if (a < 0) result = -result;
  } else {
    m = static_cast<std::uint64_t>(n);
  }
  const int twos = std::countr_zero(m);
  if (twos > 0) {
    if ((a & 1) == 0) return 0;
    const Int r8 = ((a % 8) + 8) % 8;
    if ((twos & 1) && (r8 == 3 || r8 == 5)) result = -result;
    m >>= twos;
  }
  // Jacobi symbol (a/m) for odd m > 0.
  std::uint64_t x = static_cast<std::uint64_t>(((a % static_cast<Int>(m)) + static_cast<Int>(m)) % static_cast<Int>(m));
  if (m == 1) return result;
  while (x != 0) {
    while ((x & 1) == 0) {
      x >>= 1;
      const std::uint64_t r8 = m & 7;
      if (r8 == 3 || r8 == 5) result = -result;
    }
    std::swap(x, m);
    if ((x & 3) == 3 && (m & 3) == 3) result = -result;
    x %= m;
  }
  return m == 1 ? result : 0;
}

int legendre(const BigInt& a, Int p) {
  BigInt r = a % p;
  if (r < 0) r += p;
  return kronecker(static_cast<Int>(r), p);
}

bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int q : {2, 3, 5, 7, 11, 13}) {
    if (n % q == 0) return n == q;
  }
  for (Int q = 17; q <= n / q; q += 2)
    if (n % q == 0) return false;
  return true;
}

Int isqrt(Int n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative");
  Int r = static_cast<Int>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative");
  return boost::multiprecision::sqrt(n);
}

bool is_perfect_square(Int n) {
  if (n < 0) return false;
  const Int r = isqrt(n);
  return r * r == n;
}

int valuation(Int n, Int p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

int valuation(const BigInt& n, Int p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  if (p == 2) return static_cast<int>(boost::multiprecision::lsb(abs(n)));
  int v = 0;
  BigInt q = n, r;
  const BigInt bp = p;
  for (;;) {
    boost::multiprecision::divide_qr(q, bp, q, r);
    if (r != 0) break;
    ++v;
  }
  return v;
}

std::vector<std::pair<Int, int>> factorize(Int n) {
  if (n == 0) throw std::invalid_argument("factorize: zero");
  std::uint64_t m = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  std::vector<std::pair<Int, int>> out;
  auto strip = [&](std::uint64_t p) {
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e) out.emplace_back(static_cast<Int>(p), e);
  };
  strip(2);
  strip(3);
  for (std::uint64_t p = 5; p <= m / p; p += 6) {
    strip(p);
    strip(p + 2);
  }
  if (m > 1) out.emplace_back(static_cast<Int>(m), 1);
  return out;
}

std::vector<Int> prime_divisors(Int n) {
  std::vector<Int> out;
  for (auto [p, e] : factorize(n)) out.push_back(p);
  return out;
}

Int powi(Int base, int exp) {
  Int r = 1;
  for (int i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) throw std::overflow_error("powi overflow");
  }
  return r;
}

Int mulmod(Int a, Int b, Int m) {
  __int128 r = static_cast<__int128>(a) * b % m;
  if (r < 0) r += m;
  return static_cast<Int>(r);
}

Int powmod(Int base, Int exp, Int m) {
  Int result = 1 % m;
  base %= m;
  if (base < 0) base += m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

Int invmod(Int a, Int m) {
  Int g = m, x = 0, x1 = 1, r = ((a % m) + m) % m;
  while (r != 0) {
    const Int q = g / r;
    std::tie(g, r) = std::make_pair(r, g - q * r);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw std::invalid_argument("invmod: not invertible");
  return ((x % m) + m) % m;
}

Int least_nonresidue(Int p) {
  for (Int u = 2;; ++u)
    if (kronecker(u, p) == -1) return u;
}

Int sqrtmod(Int a, Int p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  if (kronecker(a, p) != 1) throw std::invalid_argument("sqrtmod: not a residue");
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  // Tonelli-Shanks
  Int q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  const Int z = least_nonresidue(p);
  Int m = s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    Int i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    Int b = c;
    for (Int j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

bool is_squarefree(Int n) {
  if (n == 0) return false;
  for (auto [p, e] : factorize(n))
    if (e > 1) return false;
  return true;
}

SquarefreeInt SquarefreeInt::from(Int n) {
  if (!is_squarefree(n)) throw std::invalid_argument(fmt::format("{} is not a nonzero squarefree integer", n));
  return SquarefreeInt(n);
}

SquarefreeInt squarefree_part(Int d) {
  if (d == 0) throw std::invalid_argument("squarefree_part: zero");
  Int s = d < 0 ? -1 : 1;
  for (auto [p, e] : factorize(d))
    if (e & 1) s *= p;
  return SquarefreeInt(s);
}

std::vector<SquarefreeInt> sieve_squarefree(Int X) {
  if (X < 2) throw std::invalid_argument("sieve_squarefree: X must be >= 2");
  std::vector<bool> square_divisible(static_cast<std::size_t>(X), false);
  for (Int p = 2; p <= (X - 1) / p; ++p) {
    const Int q = p * p;
    for (Int j = q; j < X; j += q) square_divisible[j] = true;
  }
  std::vector<SquarefreeInt> out;
  out.reserve(static_cast<std::size_t>(1.25 * X));
  for (Int n = 1; n < X; ++n) {
    if (square_divisible[n]) continue;
    out.push_back(SquarefreeInt(n));
    out.push_back(SquarefreeInt(-n));
  }
  return out;
}

}  // namespace twistsel
