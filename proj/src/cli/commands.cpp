#include "twistsel/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "twistsel/ekstats.hpp"
#include "twistsel/quadfield.hpp"
#include "twistsel/selmer.hpp"

namespace twistsel {

namespace {

using nlohmann::ordered_json;

IsogenyPair curve_from(const RunConfig& c, bool require_eligible) {
  IsogenyPair pair;
  try {
    pair = make_pair(c.a, c.b);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (require_eligible && !pair.eligible) {
    throw ConfigError(fmt::format("{} is not eligible: {}", pair.to_string(),
                                  pair.full_two_torsion ? "a^2 - 4b is a square (full rational 2-torsion)"
                                                        : "b(a^2 - 4b) is a square (Delta Delta' is a square)"));
  }
  return pair;
}

void require_cutoff(Int X) {
  if (X < 2) throw ConfigError(fmt::format("X must be >= 2, got {}", X));
}

std::optional<QuadraticField> field_from(const RunConfig& c) {
  if (c.field == "Q" || c.field == "q") return std::nullopt;
  Int m = 0;
  try {
    std::size_t used = 0;
    m = std::stoll(c.field, &used);
    if (used != c.field.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("field must be Q or an integer m, got '{}'", c.field));
  }
  try {
    return make_field(m);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(c.output, ec);
  std::ofstream out(c.output / name, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", (c.output / name).string()));
  return out;
}

void write_json(const RunConfig& c, const std::string& name, const ordered_json& j) {
  auto out = open_output(c, name);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error(fmt::format("write failed: {}", name));
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

// f(chi) for every character in C(K, X), in enumeration order.
std::vector<double> additive_values(const AdditiveFunctionSpec& f, Int X) {
  std::vector<double> values;
  if (f.field == nullptr) {
    const FactorSieve sieve(X);
    for (SquarefreeInt d : sieve_squarefree(X)) {
      double v = 0;
      for (auto [p, e] : sieve.factor(d.value())) v += f.at(PrimeRef::rational(p));
      values.push_back(v);
    }
  } else {
    for (const auto& chi : enumerate_characters(*f.field, X)) {
      double v = 0;
      for (const auto& [pi, e] : chi.conductor().factors()) v += f.at(PrimeRef::of(pi));
      values.push_back(v);
    }
  }
  return values;
}

double mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

std::string cdf_svg(const DistributionReport& rep, Int X, const std::string& label) {
  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
  const double lo = -4, hi = 4;
  auto sx = [&](double t) { return L + (std::clamp(t, lo, hi) - lo) / (hi - lo) * (W - L - R); };
  auto sy = [&](double p) { return H - B - p * (H - T - B); };
  std::string empirical, gaussian;
  double prev = 0;
  empirical += fmt::format("{:.2f},{:.2f}", sx(lo), sy(0));
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    empirical += fmt::format(" {:.2f},{:.2f} {:.2f},{:.2f}", sx(rep.grid[i]), sy(prev), sx(rep.grid[i]), sy(rep.empirical_cdf[i]));
    prev = rep.empirical_cdf[i];
  }
  empirical += fmt::format(" {:.2f},{:.2f}", sx(hi), sy(prev));
  for (int i = 0; i <= 200; ++i) {
    const double t = lo + (hi - lo) * i / 200.0;
    gaussian += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", sx(t), sy(gaussian_cdf(t)));
  }
  std::string svg;
  svg += fmt::format("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  svg += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", W, H, W, H);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, sy(0), W - R, sy(0));
  svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, sy(0), L, sy(1));
  for (int t = -4; t <= 4; ++t)
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", sx(t), sy(0) + 16, t);
  for (double p : {0.0, 0.5, 1.0})
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", L - 6, sy(p) + 4, p);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">normalized {} (z)</text>\n",
                     (W + L - R) / 2, H - 12, label);
  svg += fmt::format("<text x=\"16\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">CDF</text>\n",
                     (H - B + T) / 2, (H - B + T) / 2);
  svg += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"13\">X = {}, n = {}, KS = {:.4f}</text>\n", L, X, rep.n, rep.ks);
  svg += fmt::format("<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>\n", empirical);
  svg += fmt::format("<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"{}\"/>\n", gaussian);
  svg += "</svg>\n";
  return svg;
}

ordered_json fail_record(const IsogenyPair& pair, const std::string& check, Int d, const std::string& detail) {
  ordered_json j;
  j["status"] = "fail";
  j["check"] = check;
  j["curve"] = {pair.a, pair.b};
  j["d"] = d;
  j["detail"] = detail;
  return j;
}

}  // namespace

std::vector<Int> ek_cutoffs(const RunConfig& c) {
  std::vector<Int> xs = c.x_list;
  if (xs.empty())
    for (Int x : {c.X / 100, c.X / 10, c.X})
      if (x >= 10) xs.push_back(x);
  for (Int x : xs) require_cutoff(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.empty()) throw ConfigError("no cutoffs >= 10");
  return xs;
}

void cmd_scan(const RunConfig& c) {
  require_cutoff(c.X);
  const IsogenyPair pair = curve_from(c, true);
  auto csv = open_output(c, "twists.csv");
  csv << "d,g_chi,correction,ord2T,dim_selphi,dim_selphihat,d2_lower_bound\n";
  std::map<int, std::size_t> hist;
  std::vector<double> ord;
  ScanOptions opts;
  opts.threads = c.threads;
  fmt::memory_buffer buf;
  scan_twists(pair, c.X, opts, [&](const SelmerDescentResult& r) {
    if (r.ord2T() != r.g_chi + r.correction) throw ConsistencyError(fmt::format("row d={} breaks ord2T = g + correction", r.d), r.d);
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{}\n", r.d, r.g_chi, r.correction, r.ord2T(), r.dim_selphi,
                   r.dim_selphihat, selmer2_lower_bound(r));
    if (buf.size() > (1 << 20)) {
      csv.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
    ++hist[r.ord2T()];
    ord.push_back(r.ord2T());
  });
  csv.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!csv) throw std::runtime_error("write failed: twists.csv");

  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["curve"] = {{"a", pair.a}, {"b", pair.b}};
  j["X"] = c.X;
  j["twists"] = ord.size();
  ordered_json counts = ordered_json::object();
  for (auto [v, n] : hist) counts[std::to_string(v)] = n;
  j["ord2T_counts"] = counts;
  ordered_json tails = ordered_json::object();
  for (int r : c.r_list) tails[std::to_string(r)] = tail_fraction(hist, r);
  j["tail_fractions"] = tails;
  const double center = mean(ord);
  ordered_json norm;
  norm["center"] = center;
  norm["center_rule"] = "empirical mean of ord2T";
  if (c.X > 15) {
    const double scale = sigma_g_predicted(static_cast<double>(c.X));
    norm["scale"] = scale;
    norm["scale_rule"] = "sqrt(log log X / 2)";
    norm["sigma_g_exact"] = sigma_g_exact(pair, c.X);
    norm["ks"] = distribution_report(ord, center, scale).ks;
  }
  j["normalization"] = norm;
  write_json(c, "summary.json", j);
}

void cmd_ek(const RunConfig& c) {
  const auto xs = ek_cutoffs(c);
  const auto field = field_from(c);
  AdditiveFunctionSpec f;
  std::optional<IsogenyPair> pair;
  if (c.f == "omega") {
    f = omega_function(field ? &*field : nullptr);
  } else if (c.f == "curve-g") {
    if (field) throw ConfigError("curve-g is defined over Q only");
    pair = curve_from(c, true);
    f = curve_g_function(*pair);
  } else {
    throw ConfigError(fmt::format("unknown function '{}' (omega or curve-g)", c.f));
  }
  for (int k : c.k_list)
    if (k < 1) throw ConfigError(fmt::format("moment order {} must be positive", k));

  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["f"] = c.f;
  j["field"] = field ? field->name() : "Q";
  ordered_json moments = ordered_json::array();
  if (f.bounded_01) {
    for (int k : c.k_list) {
      const MomentReport m = empirical_moment(f, xs.back(), k);
      ordered_json mj;
      mj["X"] = m.X;
      mj["z"] = m.z;
      mj["k"] = m.k;
      mj["empirical"] = m.empirical;
      mj["predicted"] = m.predicted;
      mj["ratio"] = m.ratio;
      mj["sigma_z"] = m.sigma;
      mj["odd_branch"] = m.odd_branch;
      mj["outside_uniform_range"] = m.outside_uniform_range;
      moments.push_back(mj);
    }
  }
  j["moments"] = moments;

  auto csv = open_output(c, "cdf.csv");
  csv << "X,grid,empirical,gaussian\n";
  ordered_json dists = ordered_json::array();
  DistributionReport last;
  for (Int X : xs) {
    const auto values = additive_values(f, X);
    double center = 0, scale = 1;
    if (pair) {
      center = mean(values);
      scale = sigma_g_exact(*pair, X);
    } else {
      center = mu_f(f, X);
      scale = sigma_f(f, X);
    }
    if (!(scale > 0)) throw ConfigError(fmt::format("X={} is too small for a positive scale", X));
    last = distribution_report(values, center, scale);
    for (std::size_t i = 0; i < last.grid.size(); ++i)
      csv << X << ',' << num(last.grid[i]) << ',' << num(last.empirical_cdf[i]) << ',' << num(last.gaussian_cdf[i]) << '\n';
    ordered_json dj;
    dj["X"] = X;
    dj["n"] = last.n;
    dj["center"] = center;
    dj["scale"] = scale;
    dj["integer_valued"] = last.integer_valued;
    dj["ks"] = last.ks;
    dists.push_back(dj);
  }
  if (!csv) throw std::runtime_error("write failed: cdf.csv");
  j["distributions"] = dists;
  write_json(c, "moments.json", j);
  auto svg = open_output(c, "cdf.svg");
  svg << cdf_svg(last, xs.back(), c.f);
}

void cmd_ideal_count(const RunConfig& c) {
  auto field = field_from(c);
  if (!field) throw ConfigError("ideal-count needs a quadratic field (--field m)");
  const QuadraticField& K = *field;
  std::vector<Int> xs = c.x_list.empty() ? std::vector<Int>{c.X} : c.x_list;
  for (Int x : xs) require_cutoff(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  IdealK q, d;
  try {
    q = parse_ideal(K, c.q);
    d = parse_ideal(K, c.d);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!d.is_squarefree() || !d.divides(q)) throw ConfigError("d must be a squarefree divisor of q");
  const double zeta2 = zeta_at_2(K);
  const auto ideals = squarefree_ideals_with_class(K, xs.back());
  const double three_omega = std::pow(3.0, q.omega());
  auto csv = open_output(c, "sfcount.csv");
  csv << "X,class,q,d,brute_count,main_term,gap,normalized_gap\n";
  for (Int X : xs) {
    const double main = mainterm_sf(K, X, q, d, zeta2);
    for (const auto& rep : K.classes().representatives) {
      const Int brute = count_sf(K, ideals, X, rep, q, d);
      const double gap = static_cast<double>(brute) - main;
      csv << X << ',' << rep.to_string() << ',' << '"' << q.to_string() << '"' << ',' << '"' << d.to_string() << '"' << ','
          << brute << ',' << num(main) << ',' << num(gap) << ',' << num(gap / (std::sqrt(static_cast<double>(X)) * three_omega))
          << '\n';
    }
  }
  if (!csv) throw std::runtime_error("write failed: sfcount.csv");
}

int cmd_audit(const RunConfig& c, std::ostream& out) {
  IsogenyPair pair;
  try {
    require_cutoff(c.X);
    pair = curve_from(c, true);
    if (!c.inject_fault.empty() && c.inject_fault != "local-table")
      throw ConfigError(fmt::format("unknown fault '{}'", c.inject_fault));
  } catch (const ConfigError& e) {
    ordered_json j;
    j["status"] = "config_error";
    j["detail"] = e.what();
    out << j.dump() << '\n';
    return 2;
  }

  ScanOptions opts;
  opts.threads = c.threads;
  if (c.inject_fault == "local-table") {
    const Place target = Place::at_prime(pair.bad_primes.back());
    opts.descent.perturb = [target](Place v, bool dual, LocalImage& img) {
      if (v == target && !dual) img.mask = 1;
    };
  }

  std::size_t twists = 0, table_checks = 0, sampled = 0;
  std::set<int> corrections;
  std::optional<ordered_json> failure;
  const IsogenyPair dual = dual_pair(pair);
  try {
    scan_twists(pair, c.X, opts, [&](const SelmerDescentResult& r) {
      if (failure) return;
      ++twists;
      corrections.insert(r.correction);
      for (const auto& [v, dim] : r.local_dims) {
        if (v.is_real() || std::binary_search(pair.bad_primes.begin(), pair.bad_primes.end(), v.prime())) continue;
        ++table_checks;
        const int table = local_dim_good_ramified(pair, v.prime());
        if (table != dim) {
          failure = fail_record(pair, "local_table", r.d, fmt::format("at {}: torsor dim {} but table {}", v.to_string(), dim, table));
          return;
        }
      }
      if (twists <= 200 && !c.inject_fault.size()) {
        ++sampled;
        if (!(descend(pair, r.d * 4) == r) || !(descend(pair, r.d * 9) == r)) {
          failure = fail_record(pair, "twist_class_invariance", r.d, "descend(d k^2) differs from descend(d)");
          return;
        }
        if (descend(dual, r.d).ord2T() != -r.ord2T()) {
          failure = fail_record(pair, "dual_symmetry", r.d, "ord2T of the dual twist is not -ord2T");
          return;
        }
        for (Int q : {3, 5, 7, 11, 13}) {
          if (r.d % q == 0 || std::binary_search(pair.bad_primes.begin(), pair.bad_primes.end(), q)) continue;
          if (local_dim(pair, r.d, Place::at_prime(q)) != 1) {
            failure = fail_record(pair, "unramified_dim", r.d, fmt::format("local dim at {} is not 1", q));
            return;
          }
        }
      }
    });
  } catch (const ConsistencyError& e) {
    failure = fail_record(pair, "descent_consistency", e.d(), e.what());
  }
  if (!failure) {
    const auto bound = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(pair.bad_primes.size() + 1)));
    if (corrections.size() > bound)
      failure = fail_record(pair, "correction_values", 0, fmt::format("{} distinct corrections > 3^{}", corrections.size(),
                                                                       pair.bad_primes.size() + 1));
  }
  if (failure) {
    out << failure->dump() << '\n';
    return 1;
  }
  ordered_json j;
  j["status"] = "pass";
  j["curve"] = {pair.a, pair.b};
  j["X"] = c.X;
  j["twists"] = twists;
  j["table_checks"] = table_checks;
  j["sampled_invariance_checks"] = sampled;
  j["distinct_corrections"] = corrections.size();
  out << j.dump() << '\n';
  return 0;
}

}  // namespace twistsel
