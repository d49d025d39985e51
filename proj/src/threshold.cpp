#include "acq/threshold.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "acq/analysis.hpp"
#include "acq/error.hpp"
#include "acq/numeric.hpp"

namespace acq {
namespace {

constexpr int kScanPoints = 100;

double escort_shannon(const SymbolModel& p, double q) {
  return shannon_entropy(escort(p, q));
}

double bisect(const SymbolModel& p, double a, double lo, double hi) {
  // Invariant: g(lo) > 0 >= g(hi) with g(q) = H1[escort(p, q)] - a.
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double g = escort_shannon(p, mid) - a;
    if (std::abs(g) <= 0.1 * kQStarTolerance || hi - lo < 1e-16) break;
    (g > 0.0 ? lo : hi) = mid;
  }
  return mid;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kAboveH0:
      return "above_H0";
    case Regime::kBetween:
      return "between";
    case Regime::kBelowH1:
      return "below_H1";
  }
  return "unknown";
}

ThresholdPlan solve_q_star(const SymbolModel& p, double a) {
  if (!(a > 0.0)) throw DomainError("threshold a must be > 0");
  const double h0 = renyi_entropy(p, 0.0);
  const double h1 = shannon_entropy(p.probs());
  ThresholdPlan plan;
  plan.a = a;
  if (a >= h0) {
    plan.regime = Regime::kAboveH0;
    plan.q_star = 0.0;
    plan.ub = 0.0;
    return plan;
  }
  if (a <= h1) {
    plan.regime = Regime::kBelowH1;
    plan.q_star = 1.0;
    plan.ub = 1.0;
    plan.warning = "threshold at or below the Shannon entropy; it will be "
                   "exceeded almost always";
    return plan;
  }

  plan.regime = Regime::kBetween;
  std::vector<double> g(kScanPoints + 1);
  bool monotone = true;
  for (int k = 0; k <= kScanPoints; ++k) {
    g[k] = escort_shannon(p, static_cast<double>(k) / kScanPoints) - a;
    if (k > 0 && g[k] > g[k - 1] + 1e-12) monotone = false;
  }
  if (monotone) {
    plan.q_star = bisect(p, a, 0.0, 1.0);
  } else {
    plan.used_fallback = true;
    int k = 0;
    while (k < kScanPoints && !(g[k] > 0.0 && g[k + 1] <= 0.0)) ++k;
    plan.q_star = bisect(p, a, static_cast<double>(k) / kScanPoints,
                         static_cast<double>(k + 1) / kScanPoints);
  }
  return plan;
}

double chernoff_exponent(const SymbolModel& p, double a, double q,
                         std::size_t length) {
  if (!(q > 0.0) || q > 1.0) throw DomainError("q must be in (0, 1]");
  return -static_cast<double>(length) * (1.0 - q) / (q * std::numbers::log2e) *
         (a - renyi_entropy(p, q));
}

ChernoffBound chernoff_ub(const SymbolModel& p, double a, double q,
                          std::size_t length) {
  if (q < 0.0 || q > 1.0) throw DomainError("q must be in [0, 1]");
  if (length < 1) throw DomainError("string length M must be >= 1");
  if (q == 0.0) {
    if (a > renyi_entropy(p, 0.0)) return {0.0, false};
    return {1.0, true};
  }
  return {std::min(1.0, std::exp(chernoff_exponent(p, a, q, length))), false};
}

ThresholdPlan plan_threshold(const SymbolModel& p, double a, std::size_t length) {
  ThresholdPlan plan = solve_q_star(p, a);
  plan.length = length;
  if (plan.regime == Regime::kBetween) {
    plan.ub = chernoff_ub(p, a, plan.q_star, length).value;
  }
  return plan;
}

double cumulant_generating(std::span<const double> p,
                           std::span<const double> lengths, double t) {
  if (p.size() != lengths.size()) {
    throw DomainError("probabilities and lengths differ in size");
  }
  std::vector<double> exponents(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    exponents[i] = t * lengths[i] * std::numbers::log2e;
  }
  return log2_sum_exp2(exponents, p) * std::numbers::ln2;
}

double stationarity_check(const SymbolModel& p, double a, double q_star) {
  if (!(q_star > 0.0) || !(q_star < 1.0)) {
    throw DomainError("stationarity needs q* in (0, 1)");
  }
  const std::vector<double> e = escort(p, q_star);
  return std::abs(a - renyi_entropy(p, q_star) -
                  q_star / (1.0 - q_star) * kl_divergence(e, p.probs()));
}

double exceed_fraction(const StringSet& strings, const SymbolModel& p, double q,
                       double a, LengthSource source, int precision,
                       unsigned threads) {
  if (strings.empty()) throw DataError("no strings");
  const double budget = static_cast<double>(strings.length()) * a;
  const std::size_t n = strings.size();
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  std::vector<std::uint64_t> exceeded(workers, 0);
  const std::size_t chunk = (n + workers - 1) / workers;

  if (source == LengthSource::kAnalytic) {
    const LengthEvaluator eval(p, q);
    const std::vector<double> info = string_information(strings, p, threads);
    parallel_for(workers, workers, [&](std::size_t wb, std::size_t we) {
      for (std::size_t w = wb; w < we; ++w) {
        for (std::size_t j = w * chunk; j < std::min(n, (w + 1) * chunk); ++j) {
          if (eval.length_from_info(info[j], strings.length()) > budget) {
            ++exceeded[w];
          }
        }
      }
    });
  } else {
    const QuantizedModel qm = quantize(p, q, precision);
    parallel_for(workers, workers, [&](std::size_t wb, std::size_t we) {
      for (std::size_t w = wb; w < we; ++w) {
        for (std::size_t j = w * chunk; j < std::min(n, (w + 1) * chunk); ++j) {
          if (static_cast<double>(codeword_length_exact(strings[j], qm)) > budget) {
            ++exceeded[w];
          }
        }
      }
    });
  }
  std::uint64_t total = 0;
  for (auto e : exceeded) total += e;
  return static_cast<double>(total) / static_cast<double>(n);
}

}  // namespace acq
