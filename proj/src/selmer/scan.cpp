#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "twistsel/selmer.hpp"

namespace twistsel {

void scan_twists(const IsogenyPair& pair, Int X, const ScanOptions& options,
                 const std::function<void(const SelmerDescentResult&)>& sink) {
  if (!pair.eligible) throw std::invalid_argument(fmt::format("scan_twists: {} is not eligible", pair.to_string()));
  if (X < 2) throw std::invalid_argument("scan_twists: X must be >= 2");
  const unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t block = std::max<std::size_t>(options.block, 1);

  const auto ds = sieve_squarefree(X);
  const FactorSieve factors(X);
  const DescentTables tables(pair, X, threads);

  auto run = [&](SquarefreeInt d) {
    std::vector<Int> primes;
    for (auto [p, e] : factors.factor(d.value())) primes.push_back(p);
    return descend(tables, d, primes, options.descent);
  };

  std::vector<SelmerDescentResult> out;
  for (std::size_t start = 0; start < ds.size(); start += block) {
    const std::size_t end = std::min(ds.size(), start + block);
    out.assign(end - start, {});
    if (threads == 1) {
      for (std::size_t i = start; i < end; ++i) out[i - start] = run(ds[i]);
    } else {
      std::exception_ptr error;
      std::mutex error_mutex;
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
          pool.emplace_back([&, w] {
            try {
              for (std::size_t i = start + w; i < end; i += threads) out[i - start] = run(ds[i]);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!error) error = std::current_exception();
            }
          });
      }
      if (error) std::rethrow_exception(error);
    }
    for (const auto& r : out) sink(r);
  }
}

std::vector<SelmerDescentResult> scan_twists(const IsogenyPair& pair, Int X, const ScanOptions& options) {
  std::vector<SelmerDescentResult> all;
  scan_twists(pair, X, options, [&all](const SelmerDescentResult& r) { all.push_back(r); });
  return all;
}

}  // namespace twistsel
