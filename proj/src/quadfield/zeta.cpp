#include <cmath>
#include <numbers>
#include <stdexcept>

#include "twistsel/quadfield.hpp"

namespace twistsel {

double zeta_residue(const QuadraticField& K) {
  const double h = K.class_number();
  const double root = std::sqrt(static_cast<double>(std::abs(K.disc())));
  if (K.is_real()) return 4.0 * h * K.regulator() / (2.0 * root);
  return 2.0 * std::numbers::pi * h / (K.num_roots_of_unity() * root);
}

double zeta_at_2_tail_bound(Int bound) {
  // sum_{p >= B} -log(1 - p^-2) <= 1.0001 * sum_{p >= B} p^-2, and with
  // pi(t) < 1.25506 t / log t partial summation gives sum <= 2.51012 / (B log B).
  const double b = static_cast<double>(bound);
  return 1.0001 * 2.51012 / (b * std::log(b));
}

double zeta_at_2(const QuadraticField& K, Int bound) {
  if (bound < 3) throw std::invalid_argument("zeta_at_2: bound must be >= 3");
  // zeta_K(2) = zeta(2) L(2, chi_dK); the L-factor at p is (1 - chi(p) p^-2)^-1.
  std::vector<bool> composite(static_cast<std::size_t>(bound), false);
  double log_l = 0.0, carry = 0.0;  // Kahan summation
  for (Int p = 2; p < bound; ++p) {
    if (composite[p]) continue;
    if (p <= (bound - 1) / p)
      for (Int j = p * p; j < bound; j += p) composite[j] = true;
    const int chi = kronecker(K.disc(), p);
    if (chi == 0) continue;
    const double inv2 = 1.0 / (static_cast<double>(p) * static_cast<double>(p));
    const double term = -std::log1p(-chi * inv2) - carry;
    const double next = log_l + term;
    carry = (next - log_l) - term;
    log_l = next;
  }
  return std::numbers::pi * std::numbers::pi / 6.0 * std::exp(log_l);
}

}  // namespace twistsel
