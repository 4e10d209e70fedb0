#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "twistsel/characters.hpp"

using namespace twistsel;

TEST_CASE("char_from_element over Q") {
  CHECK(char_from_element(12).d().value() == 3);
  CHECK(char_from_element(1).d().value() == 1);
  CHECK(char_from_element(-18).d().value() == -2);
  CHECK_THROWS_AS(char_from_element(0), std::invalid_argument);
  for (Int d = -60; d <= 60; ++d) {
    if (d == 0) continue;
    for (Int k : {2, 3, 5, 7}) CHECK(char_from_element(d * k * k) == char_from_element(d));
  }
  // chi_d(p) is the Kronecker symbol at odd unramified primes.
  for (Int d : {-7, 5, 6, -15, 21}) {
    auto chi = char_from_element(d);
    for (Int p : {3, 5, 7, 11, 13, 17, 19})
      if (d % p != 0) CHECK(chi.value(p) == kronecker(d, p));
    for (Int p : ramified_primes(chi)) CHECK(chi.value(p) == 0);
  }
}

TEST_CASE("char_from_element over Q(i)") {
  auto K = make_field(-1);
  auto chi2 = char_from_element(K, Element{2, 0});
  CHECK(chi2.conductor().is_unit());
  // 2 = -i (1+i)^2 and -i is i times a square, so chi_2 = chi_i is not trivial.
  CHECK(chi2.unit_index() == 1);
  CHECK_FALSE(chi2 == char_from_element(K, Element{1, 0}));
  CHECK(chi2 == char_from_element(K, Element{0, 1}));
  CHECK(char_from_element(K, Element{1, 0}).conductor().is_unit());
  CHECK(char_from_element(K, Element{1, 0}).unit_index() == 0);
  CHECK(char_from_element(K, Element{-1, 0}).unit_index() == 0);  // -1 = i^2
  CHECK_THROWS_AS(char_from_element(K, Element{0, 0}), std::invalid_argument);

  // chi_{d k^2} = chi_d for random d and k.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Int> coord(-25, 25);
  for (Int m : {-1, -5, -3, 2}) {
    auto F = make_field(m);
    for (int i = 0; i < 150; ++i) {
      const Element d{coord(rng), coord(rng)}, k{coord(rng) / 3, coord(rng) / 5};
      if (F.norm(d) == 0 || F.norm(k) == 0) continue;
      CHECK(char_from_element(F, F.mul(d, F.mul(k, k))) == char_from_element(F, d));
      CHECK(char_from_element(F, d).defining_element() != Element{});
      // The defining element recovers the same character.
      CHECK(char_from_element(F, char_from_element(F, d).defining_element()) == char_from_element(F, d));
    }
  }
}

TEST_CASE("enumerate_characters over Q") {
  auto ten = enumerate_characters(10);
  CHECK(ten.size() == 12);
  CHECK(ten[0].d().value() == 1);
  CHECK(ten[1].d().value() == -1);
  auto two = enumerate_characters(2);
  CHECK(two.size() == 2);

  auto big = enumerate_characters(100000);
  std::set<Int> seen;
  for (auto& chi : big) seen.insert(chi.d().value());
  CHECK(seen.size() == big.size());
  auto again = enumerate_characters(100000);
  CHECK(again == big);

  const Int X = 1000000;
  const double ratio = static_cast<double>(enumerate_characters(X).size()) / (2.0 * X * 6.0 / (std::numbers::pi * std::numbers::pi));
  CHECK(std::abs(ratio - 1.0) < 0.005);
}

TEST_CASE("ramified primes") {
  CHECK(ramified_primes(char_from_element(15)) == std::vector<Int>{3, 5});
  CHECK(ramified_primes(char_from_element(1)).empty());
  CHECK(ramified_primes(char_from_element(-6)) == std::vector<Int>{3});
  auto K = make_field(-1);
  auto chi = char_from_element(K, Element{3, 0});
  REQUIRE(ramified_prime_ideals(chi).size() == 1);
  CHECK(ramified_prime_ideals(chi)[0].norm == 9);
}

TEST_CASE("eval_additive") {
  const auto omega = omega_function();
  CHECK(eval_additive(omega, char_from_element(15)) == 2);
  CHECK(eval_additive(omega, char_from_element(1)) == 0);
  CHECK(eval_additive(omega, char_from_element(-30)) == 3);

  // g for the curve y^2 = x^3 + x^2 - x: (b/p) - ((a^2 - 4b)/p), halved, away from 2 * 5.
  AdditiveFunctionSpec g{nullptr,
                         [](const PrimeRef& pi) {
                           if (pi.p == 2 || pi.p == 5) return 0.0;
                           return (kronecker(-1, pi.p) - kronecker(5, pi.p)) / 2.0;
                         },
                         false, "g"};
  CHECK(eval_additive(g, char_from_element(11)) == -1);
  CHECK(eval_additive(g, char_from_element(1)) == 0);

  AdditiveFunctionSpec bad{nullptr, [](const PrimeRef&) { return 2.0; }, true, "bad"};
  CHECK_THROWS_AS(eval_additive(bad, char_from_element(3)), std::domain_error);

  // Additivity over coprime conductors.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Int> dist(1, 5000);
  int pairs = 0;
  while (pairs < 1000) {
    const Int d1 = squarefree_part(dist(rng)).value(), d2 = squarefree_part(dist(rng)).value();
    if (std::gcd(d1, d2) != 1) continue;
    ++pairs;
    CHECK(eval_additive(omega, char_from_element(d1 * d2)) ==
          eval_additive(omega, char_from_element(d1)) + eval_additive(omega, char_from_element(d2)));
  }
}

TEST_CASE("enumerate_characters over quadratic fields") {
  auto K = make_field(-1);
  auto small = enumerate_characters(K, 2);
  CHECK(small.size() == 2);  // a = (1) with both unit classes
  for (auto& chi : small) CHECK(chi.conductor().is_unit());

  const Int X = 100000;
  const double c = density_constant(K);
  const double count = static_cast<double>(enumerate_characters(K, X).size());
  CHECK(std::abs(count / X / c - 1.0) < 0.02);

  auto K5 = make_field(-5);
  const double c5 = density_constant(K5, zeta_at_2(K5, 1000000));
  CHECK(std::abs(static_cast<double>(enumerate_characters(K5, X).size()) / X / c5 - 1.0) < 0.02);
}

TEST_CASE("triple enumeration equals deduplicated element enumeration") {
  for (auto [m, X] : std::vector<std::pair<Int, Int>>{{-1, 1000}, {-5, 400}, {-3, 500}}) {
    auto K = make_field(m);
    std::vector<std::string> triples;
    for (auto& chi : enumerate_characters(K, X)) triples.push_back(chi.to_string());
    std::set<std::string> triple_set(triples.begin(), triples.end());
    CHECK(triple_set.size() == triples.size());

    std::set<std::string> from_elements;
    const Int box = 2 * isqrt(X) + 2;
    for (Int x = -box; x <= box; ++x)
      for (Int y = -box; y <= box; ++y) {
        const Element d{x, y};
        const Int n = K.norm(d);
        if (n == 0 || n >= X) continue;
        auto chi = char_from_element(K, d);
        if (chi.conductor().norm() * chi.class_component().norm() * chi.class_component().norm() < X)
          from_elements.insert(chi.to_string());
      }
    INFO("m=", m);
    CHECK(from_elements == triple_set);
  }
}

TEST_CASE("residue symbols are multiplicative") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<Int> coord(-50, 50);
  for (Int m : {-1, -5, 2, 13}) {
    auto K = make_field(m);
    for (const auto& pi : primes_up_to(K, 200)) {
      if (pi.p == 2) continue;
      for (int i = 0; i < 20; ++i) {
        const Element a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
        if (K.norm(a) == 0 || K.norm(b) == 0) continue;
        CHECK(residue_symbol(K, K.mul(a, b), pi) == residue_symbol(K, a, pi) * residue_symbol(K, b, pi));
        const int sa = residue_symbol(K, K.mul(a, a), pi);
        CHECK((sa == 1 || (sa == 0 && K.valuation(a, pi) > 0)));
      }
    }
  }
}
