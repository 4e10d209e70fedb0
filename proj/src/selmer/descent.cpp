#include "twistsel/selmer.hpp"

#include <algorithm>
#include <bit>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace twistsel {

namespace {

Int checked_mul(Int x, Int y) {
  Int r;
  if (__builtin_mul_overflow(x, y, &r)) throw std::overflow_error("isogeny pair coefficients overflow");
  return r;
}

bool is_square_int(Int n) { return n >= 0 && is_perfect_square(n); }

// Solvable classes of the torsor for (a, b), testing every local class.
LocalImage image_exhaustive(const BigInt& a, const BigInt& b, Place v) {
  LocalImage img;
  for (const auto& cls : local_square_classes(v)) {
    if (cls.representative == 1) continue;
    if (torsor_solvable(a, b, BigInt(cls.representative), v)) img.mask |= 1u << square_class_bits(v, cls.representative);
  }
  return img;
}

// Same result at an odd prime using that the image is a subgroup of {1, u, p, up}.
LocalImage image_odd_subgroup(const BigInt& a, const BigInt& b, Int p) {
  const Place v = Place::at_prime(p);
  const Int u = least_nonresidue(p);
  const bool has_u = torsor_solvable(a, b, BigInt(u), v);
  const bool has_p = torsor_solvable(a, b, BigInt(p), v);
  // bits: 1 = p, 2 = u, 3 = up
  if (has_u && has_p) return {0b1111u};
  if (has_u) return {0b0101u};
  if (has_p) return {0b0011u};
  if (torsor_solvable(a, b, BigInt(u) * p, v)) return {0b1001u};
  return {0b0001u};
}

struct Twist {
  BigInt a, b;
};

Twist twist_of(Int a, Int b, Int r) {
  const BigInt br(r);
  return {BigInt(a) * br, BigInt(b) * br * br};
}

Int side_a(const IsogenyPair& pair, bool dual) { return dual ? pair.a_prime() : pair.a; }
Int side_b(const IsogenyPair& pair, bool dual) { return dual ? pair.b_prime() : pair.b; }

// Representative of the local class with the given bits.
Int class_with_bits(Place v, unsigned bits) {
  for (const auto& cls : local_square_classes(v))
    if (square_class_bits(v, cls.representative) == bits) return cls.representative;
  throw std::logic_error("class_with_bits: no class");
}

std::string dump(const IsogenyPair& pair, Int d, const std::vector<Place>& places, const std::vector<LocalImage>& phi,
                 const std::vector<LocalImage>& phihat, int sel, int selhat, int g) {
  std::string out = fmt::format("descent consistency failure for {} twisted by d={}: dim Sel_phi={} dim Sel_phihat={} g={}\n",
                                pair.to_string(), d, sel, selhat, g);
  for (std::size_t i = 0; i < places.size(); ++i)
    out += fmt::format("  {}: phi mask={:#x} (dim {}), phihat mask={:#x} (dim {})\n", places[i].to_string(), phi[i].mask,
                       phi[i].dim(), phihat[i].mask, phihat[i].dim());
  return out;
}

// dim over F_2 of the classes in <g_0, ..., g_{n-1}> lying in every local image.
int selmer_rank(const std::vector<Place>& places, const std::vector<Int>& gens, const std::vector<LocalImage>& images) {
  const std::size_t n = gens.size();
  if (n > 64) throw std::length_error("too many generators for the Selmer search space");
  std::vector<std::uint64_t> rows;
  for (std::size_t i = 0; i < places.size(); ++i) {
    const Place v = places[i];
    const unsigned r = static_cast<unsigned>(square_class_rank(v));
    std::vector<unsigned> coords(n);
    for (std::size_t j = 0; j < n; ++j) coords[j] = square_class_bits(v, gens[j]);
    for (unsigned ell = 1; ell < (1u << r); ++ell) {
      bool annihilates = true;
      for (unsigned w = 0; w < (1u << r) && annihilates; ++w)
        if (images[i].contains(w) && (std::popcount(ell & w) & 1)) annihilates = false;
      if (!annihilates) continue;
      std::uint64_t row = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (std::popcount(ell & coords[j]) & 1) row |= std::uint64_t{1} << j;
      rows.push_back(row);
    }
  }
  int rank = 0;
  for (std::size_t col = 0; col < n; ++col) {
    const std::uint64_t bit = std::uint64_t{1} << col;
    auto pivot = std::find_if(rows.begin() + rank, rows.end(), [bit](std::uint64_t r) { return r & bit; });
    if (pivot == rows.end()) continue;
    std::swap(*pivot, rows[rank]);
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (static_cast<int>(k) != rank && (rows[k] & bit)) rows[k] ^= rows[rank];
    ++rank;
  }
  return static_cast<int>(n) - rank;
}

}  // namespace

std::string IsogenyPair::to_string() const { return fmt::format("E(a={}, b={})", a, b); }

IsogenyPair make_pair(Int a, Int b) {
  const Int disc = checked_mul(a, a) - checked_mul(4, b);
  if (b == 0 || disc == 0) throw std::invalid_argument(fmt::format("singular pair (a={}, b={}): b(a^2-4b) = 0", a, b));
  IsogenyPair pair;
  pair.a = a;
  pair.b = b;
  pair.delta_class_E = disc;
  pair.delta_class_Eprime = b;
  pair.full_two_torsion = is_square_int(disc);
  pair.square_delta_product = is_square_int(checked_mul(b, disc));
  pair.eligible = !pair.full_two_torsion && !pair.square_delta_product;
  std::vector<Int> bad = prime_divisors(checked_mul(2, b));
  for (Int p : prime_divisors(disc)) bad.push_back(p);
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  pair.bad_primes = std::move(bad);
  return pair;
}

IsogenyPair dual_pair(const IsogenyPair& pair) { return make_pair(pair.a_prime(), pair.b_prime()); }

int LocalImage::dim() const {
  const int n = std::popcount(mask);
  if (!std::has_single_bit(static_cast<unsigned>(n))) return -1;
  return std::countr_zero(static_cast<unsigned>(n));
}

LocalImage local_image(const IsogenyPair& pair, Int d, Place v) {
  if (d == 0) throw std::invalid_argument("local_image: d must be nonzero");
  const Twist t = twist_of(pair.a, pair.b, d);
  return image_exhaustive(t.a, t.b, v);
}

int local_dim(const IsogenyPair& pair, Int d, Place v) {
  const int dim = local_image(pair, d, v).dim();
  if (dim < 0) throw std::logic_error("local_dim: solvable classes do not form a subgroup");
  return dim;
}

int local_dim_good_ramified(const IsogenyPair& pair, Int p) {
  if (p <= 2 || !is_prime(p)) throw std::invalid_argument(fmt::format("local_dim_good_ramified: {} is not an odd prime", p));
  if (std::binary_search(pair.bad_primes.begin(), pair.bad_primes.end(), p))
    throw std::invalid_argument(fmt::format("local_dim_good_ramified: {} divides 2*Delta", p));
  const int s = kronecker(pair.delta_class_E, p);
  const int s_prime = kronecker(pair.delta_class_Eprime, p);
  return 1 + (s_prime - s) / 2;
}

int g_chi(const IsogenyPair& pair, Int d) {
  if (d == 0) throw std::invalid_argument("g_chi: d must be nonzero");
  int g = 0;
  for (Int p : prime_divisors(squarefree_part(d).value())) {
    if (std::binary_search(pair.bad_primes.begin(), pair.bad_primes.end(), p)) continue;
    g += (kronecker(pair.delta_class_Eprime, p) - kronecker(pair.delta_class_E, p)) / 2;
  }
  return g;
}

int g_chi(const IsogenyPair& pair, const QuadraticCharacter& chi) {
  if (!chi.over_q()) throw std::invalid_argument("g_chi: curves are over Q only");
  return g_chi(pair, chi.d().value());
}

int SelmerDescentResult::local_dim_at(Place v) const {
  for (const auto& [w, dim] : local_dims)
    if (w == v) return dim;
  return 1;
}

DescentTables::DescentTables(const IsogenyPair& pair, Int prime_bound, unsigned threads)
    : pair_(pair), prime_bound_(std::max<Int>(prime_bound, 0)) {
  for (int dual = 0; dual < 2; ++dual) {
    const Int a = side_a(pair_, dual), b = side_b(pair_, dual);
    for (int sign = 0; sign < 2; ++sign) {
      const Twist t = twist_of(a, b, sign ? -1 : 1);
      real_[dual][sign] = image_exhaustive(t.a, t.b, Place::real());
    }
  }
  for (Int p : pair_.bad_primes) {
    const Place v = Place::at_prime(p);
    std::array<std::vector<LocalImage>, 2> images;
    const unsigned classes = 1u << square_class_rank(v);
    for (int dual = 0; dual < 2; ++dual) {
      images[dual].resize(classes);
      for (unsigned bits = 0; bits < classes; ++bits) {
        const Twist t = twist_of(side_a(pair_, dual), side_b(pair_, dual), class_with_bits(v, bits));
        images[dual][bits] = image_exhaustive(t.a, t.b, v);
      }
    }
    bad_.emplace_back(p, std::move(images));
  }

  if (prime_bound_ <= 3) return;
  const PrimeTable primes = sieve_primes(prime_bound_);
  good_index_.assign(static_cast<std::size_t>(prime_bound_), -1);
  std::vector<Int> good;
  for (Int p : primes.primes())
    if (p != 2 && !std::binary_search(pair_.bad_primes.begin(), pair_.bad_primes.end(), p)) {
      good_index_[static_cast<std::size_t>(p)] = static_cast<std::int32_t>(good.size());
      good.push_back(p);
    }
  good_.resize(good.size());
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Int p = good[i];
      const Int u = least_nonresidue(p);
      for (int dual = 0; dual < 2; ++dual)
        for (int res = 0; res < 2; ++res) {
          const Twist t = twist_of(side_a(pair_, dual), side_b(pair_, dual), res ? u * p : p);
          good_[i][dual * 2 + res] = image_odd_subgroup(t.a, t.b, p);
        }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(good.size() / 256 + 1)));
  if (workers == 1) {
    fill(0, good.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (good.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(good.size(), w * chunk), end = std::min(good.size(), begin + chunk);
      pool.emplace_back(fill, begin, end);
    }
  }
}

LocalImage DescentTables::image(Place v, Int d, bool dual) const {
  if (v.is_real()) return real_[dual][d < 0 ? 1 : 0];
  const Int p = v.prime();
  for (const auto& [q, images] : bad_)
    if (q == p) return images[dual][square_class_bits(v, d)];
  const unsigned bits = square_class_bits(v, d);
  if ((bits & 1u) == 0) return {0b0101u};  // unramified twist: the unit classes
  if (p < prime_bound_ && good_index_[static_cast<std::size_t>(p)] >= 0)
    return good_[static_cast<std::size_t>(good_index_[static_cast<std::size_t>(p)])][(dual ? 2 : 0) + (bits >> 1)];
  const Twist t = twist_of(side_a(pair_, dual), side_b(pair_, dual), local_class_representative(v, d));
  return image_odd_subgroup(t.a, t.b, p);
}

SelmerDescentResult descend(const DescentTables& tables, SquarefreeInt sd, const std::vector<Int>& primes_of_d,
                            const DescentOptions& options) {
  const IsogenyPair& pair = tables.pair();
  const Int d = sd.value();

  std::vector<Int> finite = pair.bad_primes;
  finite.insert(finite.end(), primes_of_d.begin(), primes_of_d.end());
  std::sort(finite.begin(), finite.end());
  finite.erase(std::unique(finite.begin(), finite.end()), finite.end());

  std::vector<Place> places{Place::real()};
  std::vector<Int> gens{-1};
  for (Int p : finite) {
    places.push_back(Place::at_prime(p));
    gens.push_back(p);
  }

  std::vector<LocalImage> phi(places.size()), phihat(places.size());
  for (std::size_t i = 0; i < places.size(); ++i) {
    phi[i] = tables.image(places[i], d, false);
    phihat[i] = tables.image(places[i], d, true);
    if (options.perturb) {
      options.perturb(places[i], false, phi[i]);
      options.perturb(places[i], true, phihat[i]);
    }
  }

  SelmerDescentResult res;
  res.d = d;
  res.g_chi = 0;
  for (Int p : primes_of_d)
    if (!std::binary_search(pair.bad_primes.begin(), pair.bad_primes.end(), p))
      res.g_chi += (kronecker(pair.delta_class_Eprime, p) - kronecker(pair.delta_class_E, p)) / 2;

  auto fail = [&](const std::string& why) -> ConsistencyError {
    return ConsistencyError(why + "\n" + dump(pair, d, places, phi, phihat, res.dim_selphi, res.dim_selphihat, res.g_chi), d);
  };

  for (std::size_t i = 0; i < places.size(); ++i) {
    const int dim = phi[i].dim(), dimhat = phihat[i].dim();
    if (dim < 0 || dimhat < 0) throw fail(fmt::format("local image at {} is not a subgroup", places[i].to_string()));
    // The two images are exact annihilators, so their orders multiply to |Q_v^*/Q_v^*2|.
    if (dim + dimhat != square_class_rank(places[i]))
      throw fail(fmt::format("local images at {} are not complementary", places[i].to_string()));
    res.local_dims.emplace_back(places[i], dim);
    res.ord2T_product += dim - 1;
    const bool bad = places[i].is_real() ||
                     std::binary_search(pair.bad_primes.begin(), pair.bad_primes.end(), places[i].prime());
    if (bad) res.correction += dim - 1;
  }

  res.dim_selphi = selmer_rank(places, gens, phi);
  res.dim_selphihat = selmer_rank(places, gens, phihat);
  res.ord2T_ratio = res.dim_selphi - res.dim_selphihat;

  if (res.ord2T_product != res.ord2T_ratio)
    throw fail(fmt::format("product formula {} != Selmer ratio {}", res.ord2T_product, res.ord2T_ratio));
  if (res.ord2T_product != res.g_chi + res.correction)
    throw fail(fmt::format("ord2T {} != g {} + correction {}", res.ord2T_product, res.g_chi, res.correction));

#ifndef NDEBUG
  // Classes ramified outside the search space fail the unramified condition.
  int checked = 0;
  for (Int q = 3; checked < 2; q += 2) {
    if (!is_prime(q) || std::binary_search(finite.begin(), finite.end(), q)) continue;
    ++checked;
    const Twist t = twist_of(pair.a, pair.b, d);
    if (image_exhaustive(t.a, t.b, Place::at_prime(q)).mask != 0b0101u)
      throw fail(fmt::format("unramified condition fails at {}", q));
  }
#endif
  return res;
}

SelmerDescentResult descend(const IsogenyPair& pair, Int d, const DescentOptions& options) {
  if (d == 0) throw std::invalid_argument("descend: d must be nonzero");
  const SquarefreeInt sd = squarefree_part(d);
  const DescentTables tables(pair, 0);
  return descend(tables, sd, prime_divisors(sd.value()), options);
}

int selmer_phi_dim(const IsogenyPair& pair, Int d) { return descend(pair, d).dim_selphi; }
int selmer_phihat_dim(const IsogenyPair& pair, Int d) { return descend(pair, d).dim_selphihat; }

int selmer2_lower_bound(const SelmerDescentResult& result) { return result.ord2T() - 2; }

}  // namespace twistsel
