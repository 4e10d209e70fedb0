#include "twistsel/ekstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace twistsel {

namespace {

// Neumaier compensated sum; order-dependent only through the input order.
class Sum {
 public:
  void add(double x) {
    const double t = s_ + x;
    c_ += std::abs(s_) >= std::abs(x) ? (s_ - t) + x : (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0, c_ = 0;
};

std::vector<PrimeRef> primes_below(const AdditiveFunctionSpec& f, Int X) {
  std::vector<PrimeRef> out;
  if (X <= 2) return out;
  if (f.field == nullptr) {
    const PrimeTable table = sieve_primes(X);
    for (Int p : table.primes()) out.push_back(PrimeRef::rational(p));
  } else {
    for (const auto& pi : primes_up_to(*f.field, X)) out.push_back(PrimeRef::of(pi));
  }
  return out;
}

template <class Term>
double prime_sum(const AdditiveFunctionSpec& f, Int X, Term term) {
  Sum s;
  for (const auto& pi : primes_below(f, X)) s.add(term(f.at(pi), static_cast<double>(pi.norm)));
  return s.value();
}

bool in_sorted(const std::vector<Int>& v, Int p) { return std::binary_search(v.begin(), v.end(), p); }

}  // namespace

double mu_f(const AdditiveFunctionSpec& f, Int X) {
  return prime_sum(f, X, [](double v, double n) { return v / n; });
}

double sigma_f(const AdditiveFunctionSpec& f, Int X) {
  return std::sqrt(prime_sum(f, X, [](double v, double n) { return v * v / n; }));
}

double mu_tilde_f(const AdditiveFunctionSpec& f, Int X) {
  return prime_sum(f, X, [](double v, double n) { return v / (n + 1); });
}

double centered_g(const AdditiveFunctionSpec& f, const PrimeRef& pi, const QuadraticCharacter& chi) {
  if (f.field != chi.base_field()) throw std::invalid_argument("centered_g: function and character over different fields");
  const double v = f.at(pi);
  const double n = static_cast<double>(pi.norm);
  bool divides = false;
  if (chi.over_q()) {
    divides = chi.d().value() % pi.p == 0;
  } else {
    for (const auto& [q, e] : chi.conductor().factors())
      if (q.p == pi.p && q.conjugate_index == pi.index && q.norm == pi.norm) divides = true;
  }
  return divides ? v * (1.0 - 1.0 / (n + 1)) : -v / (n + 1);
}

double moment_constant(int k) {
  if (k < 2 || k % 2) throw std::invalid_argument(fmt::format("moment_constant: k={} must be even and >= 2", k));
  double c = 1;
  for (int j = k - 1; j > 1; j -= 2) c *= j;
  return c;
}

double moment_constant_gamma(int k) {
  if (k < 1) throw std::invalid_argument("moment_constant_gamma: k must be positive");
  return std::exp(std::lgamma(k + 1.0) - 0.5 * k * std::numbers::ln2 - std::lgamma(0.5 * k + 1.0));
}

MomentReport empirical_moment(const AdditiveFunctionSpec& f, Int X, int k, std::optional<double> z) {
  if (k < 1) throw std::invalid_argument("empirical_moment: k must be positive");
  if (!f.bounded_01) throw std::invalid_argument(fmt::format("empirical_moment: {} is not bounded in [0, 1]", f.name));
  MomentReport rep;
  rep.X = X;
  rep.k = k;
  rep.z = z ? *z : std::pow(static_cast<double>(X), 0.5 / k);
  const Int zc = static_cast<Int>(std::ceil(rep.z));  // primes with norm < z are those with norm < ceil(z)
  const double shift = mu_tilde_f(f, zc);
  rep.sigma = sigma_f(f, zc);

  Sum total;
  std::size_t count = 0;
  auto accumulate = [&](double fz) {
    total.add(std::pow(fz - shift, k));
    ++count;
  };
  if (f.field == nullptr) {
    const FactorSieve sieve(X);
    for (SquarefreeInt d : sieve_squarefree(X)) {
      double fz = 0;
      for (auto [p, e] : sieve.factor(d.value()))
        if (p < zc) fz += f.at(PrimeRef::rational(p));
      accumulate(fz);
    }
  } else {
    for (const auto& chi : enumerate_characters(*f.field, X)) {
      double fz = 0;
      for (const auto& [pi, e] : chi.conductor().factors())
        if (pi.norm < zc) fz += f.at(PrimeRef::of(pi));
      accumulate(fz);
    }
  }
  rep.empirical = count ? total.value() / static_cast<double>(count) : 0.0;
  rep.odd_branch = k % 2 == 1;
  rep.predicted = rep.odd_branch ? moment_constant_gamma(k) * std::pow(rep.sigma, k - 1) * std::pow(k, 1.5)
                                 : moment_constant(k) * std::pow(rep.sigma, k);
  rep.ratio = rep.predicted > 0 ? rep.empirical / rep.predicted : 0.0;
  rep.outside_uniform_range = k > std::pow(rep.sigma, 2.0 / 3.0);
  return rep;
}

double mainterm_G(const AdditiveFunctionSpec& f, std::span<const std::pair<PrimeRef, int>> q) {
  double g = 1;
  for (const auto& [pi, alpha] : q) {
    if (alpha < 1) throw std::invalid_argument("mainterm_G: exponents must be positive");
    if (alpha == 1) return 0.0;
    const double v = f.at(pi), n = static_cast<double>(pi.norm);
    g *= std::pow(v, alpha) / (n + 1) * (std::pow(1 - 1 / (n + 1), alpha) + n * std::pow(-1 / (n + 1), alpha));
  }
  return g;
}

double gaussian_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

DistributionReport distribution_report(std::span<const double> values, double center, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("distribution_report: scale must be positive");
  if (values.empty()) throw std::invalid_argument("distribution_report: no values");
  DistributionReport rep;
  rep.n = values.size();
  rep.center = center;
  rep.scale = scale;
  std::vector<double> v(values.begin(), values.end());
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("distribution_report: non-finite value");
  std::sort(v.begin(), v.end());
  rep.integer_valued = std::all_of(v.begin(), v.end(), [](double x) { return x == std::round(x); });
  const double n = static_cast<double>(v.size());

  if (rep.integer_valued) {
    const auto lo = static_cast<long long>(v.front()), hi = static_cast<long long>(v.back());
    std::size_t below = 0;
    for (long long m = lo - 1; m <= hi; ++m) {
      const double cut = static_cast<double>(m) + 0.5;
      while (below < v.size() && v[below] <= cut) ++below;
      const double t = (cut - center) / scale;
      rep.grid.push_back(t);
      rep.empirical_cdf.push_back(static_cast<double>(below) / n);
      rep.gaussian_cdf.push_back(gaussian_cdf(t));
      rep.ks = std::max(rep.ks, std::abs(rep.empirical_cdf.back() - rep.gaussian_cdf.back()));
    }
  } else {
    double left = 0;
    for (std::size_t i = 0; i < v.size();) {
      std::size_t j = i;
      while (j < v.size() && v[j] == v[i]) ++j;
      const double t = (v[i] - center) / scale;
      const double emp = static_cast<double>(j) / n, gauss = gaussian_cdf(t);
      rep.grid.push_back(t);
      rep.empirical_cdf.push_back(emp);
      rep.gaussian_cdf.push_back(gauss);
      rep.ks = std::max({rep.ks, std::abs(emp - gauss), std::abs(left - gauss)});
      left = emp;
      i = j;
    }
  }
  return rep;
}

double mertens_char_sum(Int c, Int X) {
  if (c == 0 || (c > 0 && is_perfect_square(c)))
    throw std::invalid_argument(fmt::format("mertens_char_sum: {} is a square", c));
  Sum s;
  if (X < 2) return 0.0;
  const PrimeTable table = sieve_primes(X + 1);
  for (Int p : table.primes()) s.add((1.0 + kronecker(c, p)) / static_cast<double>(p));
  return s.value();
}

double mertens_char_sum(const QuadraticField& K, const Element& c, Int X) {
  if (K.norm(c) == 0 || K.is_square(c)) throw std::invalid_argument("mertens_char_sum: c is a square in the field");
  Sum s;
  if (X < 2) return 0.0;
  for (const auto& pi : primes_up_to(K, X + 1)) {
    const int symbol = pi.p == 2 ? 0 : residue_symbol(K, c, pi);
    s.add((1.0 + symbol) / static_cast<double>(pi.norm));
  }
  return s.value();
}

double sigma_g_predicted(double X) {
  if (!(X > std::numbers::e)) throw std::invalid_argument("sigma_g_predicted: log log X must be positive");
  return std::sqrt(0.5 * std::log(std::log(X)));
}

double sigma_g_exact(const IsogenyPair& pair, Int X) {
  Sum s;
  if (X > 2) {
    const PrimeTable table = sieve_primes(X);
    for (Int p : table.primes()) {
      if (in_sorted(pair.bad_primes, p)) continue;
      const int symbol = kronecker(pair.delta_class_E, p) * kronecker(pair.delta_class_Eprime, p);
      s.add((1.0 - symbol) / static_cast<double>(p));
    }
  }
  return std::sqrt(0.5 * s.value());
}

AdditiveFunctionSpec curve_g_function(const IsogenyPair& pair) {
  return {nullptr,
          [pair](const PrimeRef& pi) {
            if (in_sorted(pair.bad_primes, pi.p)) return 0.0;
            return (kronecker(pair.delta_class_Eprime, pi.p) - kronecker(pair.delta_class_E, pi.p)) / 2.0;
          },
          false, "curve-g"};
}

double tail_fraction(std::span<const SelmerDescentResult> results, int r) {
  if (results.empty()) throw std::invalid_argument("tail_fraction: no results");
  const auto hits = std::count_if(results.begin(), results.end(), [r](const auto& x) { return x.ord2T() >= r; });
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

double tail_fraction(const std::map<int, std::size_t>& hist, int r) {
  std::size_t total = 0, hits = 0;
  for (auto [v, n] : hist) {
    total += n;
    if (v >= r) hits += n;
  }
  if (total == 0) throw std::invalid_argument("tail_fraction: no results");
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace twistsel
