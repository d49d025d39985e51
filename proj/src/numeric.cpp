#include "acq/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace acq {

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double log2_sum_exp2(std::span<const double> exponents,
                     std::span<const double> weights) {
  const bool weighted = !weights.empty();
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (weighted && weights[i] <= 0.0) continue;
    top = std::max(top, exponents[i]);
  }
  if (!std::isfinite(top)) return top;
  CompensatedSum s;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    const double w = weighted ? weights[i] : 1.0;
    if (w <= 0.0) continue;
    s.add(w * std::exp2(exponents[i] - top));
  }
  return top + std::log2(s.value());
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, threads), n);
  if (workers == 1) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &errors, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace acq
