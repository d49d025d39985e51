#include "acq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acq/error.hpp"
#include "acq/numeric.hpp"

namespace acq {
namespace {

std::atomic<std::uint64_t> g_tie_count{0};

constexpr double kZeroT = 1e-9;

std::vector<double> neg_log2_table(const SymbolModel& p) {
  std::vector<double> table;
  table.reserve(p.size());
  for (double x : p.probs()) table.push_back(-std::log2(x));
  return table;
}

double information_from_table(std::span<const std::uint32_t> s,
                              std::span<const double> table) {
  CompensatedSum sum;
  for (std::uint32_t id : s) {
    if (id >= table.size()) throw DataError("unsupported symbol");
    sum.add(table[id]);
  }
  return sum.value();
}

LengthHistogram histogram_at(std::span<const double> informations,
                             std::size_t length, const LengthEvaluator& eval,
                             std::uint32_t* row, unsigned threads) {
  const std::size_t n = informations.size();
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  std::vector<LengthHistogram> partial(std::max(1u, workers));
  const std::size_t chunk = (n + partial.size() - 1) / partial.size();
  parallel_for(partial.size(), workers, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      auto& hist = partial[w];
      for (std::size_t j = begin; j < end; ++j) {
        const std::uint32_t len = eval.length_from_info(informations[j], length);
        if (row != nullptr) row[j] = len;
        ++hist[len];
      }
    }
  });
  LengthHistogram merged;
  for (const auto& h : partial) {
    for (const auto& [len, count] : h) merged[len] += count;
  }
  return merged;
}

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

std::uint64_t ceiling_tie_count() { return g_tie_count.load(); }
void reset_ceiling_tie_count() { g_tie_count.store(0); }

double information_bits(std::span<const std::uint32_t> s, const SymbolModel& p) {
  return information_from_table(s, neg_log2_table(p));
}

LengthEvaluator::LengthEvaluator(const SymbolModel& p, double q)
    : model_(&p), q_(q) {
  if (q < 0.0) throw DomainError("escort order q must be >= 0");
  log2_z_ = q == 0.0 ? std::log2(static_cast<double>(p.size()))
                     : log2_power_sum(p.probs(), q);
}

std::uint32_t LengthEvaluator::length_from_info(double info_bits,
                                                std::size_t length) const {
  const double x = pre_ceiling(info_bits, length);
  const double nearest = std::nearbyint(x);
  double bits;
  if (std::abs(x - nearest) <= kCeilingTieTolerance) {
    g_tie_count.fetch_add(1, std::memory_order_relaxed);
    bits = nearest;
  } else {
    bits = std::ceil(x);
  }
  return static_cast<std::uint32_t>(std::max(1.0, bits));
}

std::uint32_t LengthEvaluator::length(std::span<const std::uint32_t> s) const {
  return length_from_info(information_bits(s, *model_), s.size());
}

std::uint32_t analytic_length(std::span<const std::uint32_t> s,
                              const SymbolModel& p, double q) {
  return LengthEvaluator(p, q).length(s);
}

std::vector<double> empirical_counts(std::span<const std::uint32_t> s,
                                     std::size_t alphabet_size) {
  if (s.empty()) throw DomainError("empty string");
  std::vector<std::uint64_t> counts(alphabet_size, 0);
  for (std::uint32_t id : s) {
    if (id >= alphabet_size) throw DataError("unsupported symbol");
    ++counts[id];
  }
  std::vector<double> f(alphabet_size);
  for (std::size_t i = 0; i < alphabet_size; ++i) {
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(s.size());
  }
  return f;
}

double cross_entropy_identity_check(std::span<const std::uint32_t> s,
                                    const SymbolModel& p, double q) {
  const LengthEvaluator eval(p, q);
  const double analytic = eval.pre_ceiling(information_bits(s, p), s.size()) - 1.0;
  const std::vector<double> f = empirical_counts(s, p.size());
  return analytic -
         static_cast<double>(s.size()) * cross_entropy(f, escort(p, q));
}

double exp_avg_length(std::span<const double> lengths, double t,
                      std::span<const double> weights) {
  if (lengths.empty()) throw DomainError("no lengths to average");
  if (!(t > -1.0)) throw DomainError("exponent t must be > -1");
  if (!weights.empty() && weights.size() != lengths.size()) {
    throw DomainError("weights and lengths differ in size");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    if (!weights.empty() && weights[j] <= 0.0) continue;
    lo = std::min(lo, lengths[j]);
    hi = std::max(hi, lengths[j]);
  }
  double result;
  if (std::abs(t) < kZeroT) {
    CompensatedSum mean;
    for (std::size_t j = 0; j < lengths.size(); ++j) {
      const double w = weights.empty() ? 1.0 / static_cast<double>(lengths.size())
                                       : weights[j];
      mean.add(w * lengths[j]);
    }
    result = mean.value();
  } else {
    std::vector<double> exponents(lengths.size());
    for (std::size_t j = 0; j < lengths.size(); ++j) exponents[j] = t * lengths[j];
    double log_sum = log2_sum_exp2(exponents, weights);
    if (weights.empty()) log_sum -= std::log2(static_cast<double>(lengths.size()));
    result = log_sum / t;
  }
  return std::clamp(result, lo, hi);
}

double exp_avg_length(const LengthHistogram& histogram, double t) {
  std::vector<double> lengths;
  std::vector<double> weights;
  double total = 0.0;
  for (const auto& [len, count] : histogram) total += static_cast<double>(count);
  for (const auto& [len, count] : histogram) {
    lengths.push_back(len);
    weights.push_back(static_cast<double>(count) / total);
  }
  return exp_avg_length(lengths, t, weights);
}

std::vector<double> make_q_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be > 0");
  if (stop < start) throw DomainError("grid stop must be >= start");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    const double q = start + static_cast<double>(i) * step;
    if (q > stop + 1e-9) break;
    // Snap to 12 decimals so 0.1 * 3 prints and compares as 0.3.
    grid.push_back(std::round(q * 1e12) / 1e12);
  }
  return grid;
}

std::vector<double> string_information(const StringSet& strings,
                                       const SymbolModel& p, unsigned threads) {
  const std::vector<double> table = neg_log2_table(p);
  std::vector<double> info(strings.size());
  parallel_for(strings.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      info[j] = information_from_table(strings[j], table);
    }
  });
  return info;
}

double empirical_exp_length(std::span<const double> informations,
                            std::size_t length, const SymbolModel& p, double q,
                            double t) {
  if (informations.empty()) throw DataError("no strings");
  const LengthEvaluator eval(p, q);
  return exp_avg_length(histogram_at(informations, length, eval, nullptr, 1), t);
}

SweepOutput sweep(const StringSet& strings, const SymbolModel& p,
                  const std::vector<double>& q_grid,
                  const std::vector<double>& t_list,
                  const SweepOptions& options) {
  if (strings.empty()) throw DataError("no strings to sweep");
  if (q_grid.empty()) throw DomainError("empty q grid");
  if (!std::is_sorted(q_grid.begin(), q_grid.end()) ||
      std::adjacent_find(q_grid.begin(), q_grid.end()) != q_grid.end()) {
    throw DomainError("q grid must be strictly increasing");
  }
  for (double t : t_list) campbell_q(t);

  const std::size_t m = strings.length();
  const std::vector<double> info = string_information(strings, p, options.threads);

  SweepOutput out;
  LengthMatrix& mat = out.matrix;
  mat.q_grid = q_grid;
  mat.length = m;
  mat.string_count = strings.size();
  if (options.keep_matrix) mat.lengths.resize(q_grid.size() * strings.size());
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    const LengthEvaluator eval(p, q_grid[i]);
    std::uint32_t* row =
        options.keep_matrix ? mat.lengths.data() + i * strings.size() : nullptr;
    mat.histograms.push_back(histogram_at(info, m, eval, row, options.threads));
  }

  for (double t : t_list) {
    SweepResult r;
    r.t = t;
    r.q_t = campbell_q(t);
    for (const auto& hist : mat.histograms) {
      r.l_emp.push_back(exp_avg_length(hist, t));
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(r.l_emp.begin(), r.l_emp.end()) - r.l_emp.begin());
    r.argmin_q = q_grid[best];
    r.refined_argmin_q = r.argmin_q;
    if (options.refine && q_grid.size() > 1) {
      const double lo = q_grid[best == 0 ? 0 : best - 1];
      const double hi = q_grid[std::min(best + 1, q_grid.size() - 1)];
      const auto f = [&](double q) { return empirical_exp_length(info, m, p, q, t); };
      const double candidate = golden_section_min(f, lo, hi, 40);
      if (f(candidate) < r.l_emp[best]) r.refined_argmin_q = candidate;
    }
    r.renyi_line = static_cast<double>(m) * renyi_entropy(p, r.q_t);
    r.l_emp_at_qt = empirical_exp_length(info, m, p, r.q_t, t);
    r.gap_at_qt = r.l_emp_at_qt - r.renyi_line;
    out.results.push_back(std::move(r));
  }
  return out;
}

double cost_advantage(const StringSet& strings, const SymbolModel& p, double t,
                      unsigned threads) {
  if (strings.empty()) throw DataError("no strings");
  const std::vector<double> info = string_information(strings, p, threads);
  const double q_t = campbell_q(t);
  return empirical_exp_length(info, strings.length(), p, 1.0, t) -
         empirical_exp_length(info, strings.length(), p, q_t, t);
}

}  // namespace acq
