#ifndef ACQ_THRESHOLD_HPP
#define ACQ_THRESHOLD_HPP

#include <optional>
#include <span>
#include <string>

#include "acq/coder.hpp"
#include "acq/corpus.hpp"
#include "acq/model.hpp"

namespace acq {

enum class Regime {
  kAboveH0,  // a >= H0: uniform coding never exceeds, q* = 0, UB = 0
  kBetween,  // H1 < a < H0: H1[escort(p, q*)] = a
  kBelowH1,  // a <= H1: bound uninformative, q* = 1, UB = 1
};

std::string to_string(Regime r);

/// Tolerance on |H1[escort(p, q*)] - a| for the bisection.
inline constexpr double kQStarTolerance = 1e-9;

struct ThresholdPlan {
  double a = 0.0;
  Regime regime = Regime::kBetween;
  double q_star = 1.0;
  double ub = 1.0;
  std::size_t length = 0;  // M; 0 when no bound was evaluated
  /// Set for the below-H1 regime, which is a valid but uninformative answer.
  std::optional<std::string> warning;
  /// True when the pre-flight scan found H1[escort(p, q)] non-monotone and
  /// the grid-scan fallback was used.
  bool used_fallback = false;
};

/// Escort order minimising the Chernoff bound for per-symbol budget a.
/// Throws DomainError for a <= 0.
ThresholdPlan solve_q_star(const SymbolModel& p, double a);

/// solve_q_star plus the Chernoff bound for strings of length M.
ThresholdPlan plan_threshold(const SymbolModel& p, double a, std::size_t length);

struct ChernoffBound {
  double value = 1.0;
  /// q = 0 with a <= H0: the exponent is not negative, bound is vacuous.
  bool degenerate = false;
};

/// min(1, exp(-M (1-q)/(q log2 e) (a - H_q[p]))) for q in (0, 1]; the q -> 0
/// limit is 0 when a > H0. Throws DomainError for q outside [0, 1] or M < 1.
ChernoffBound chernoff_ub(const SymbolModel& p, double a, double q,
                          std::size_t length);

/// Exponent of the bound as a function of q (natural log of the unclamped
/// bound): -M (1-q)/(q log2 e) (a - H_q[p]).
double chernoff_exponent(const SymbolModel& p, double a, double q,
                         std::size_t length);

/// mu(t) = ln sum_i p_i e^{t l_i}, in nats.
double cumulant_generating(std::span<const double> p,
                           std::span<const double> lengths, double t);

/// |a - H_{q*}[p] - q*/(1-q*) D_KL(escort(p, q*) || p)|.
double stationarity_check(const SymbolModel& p, double a, double q_star);

enum class LengthSource { kAnalytic, kExactCoder };

/// Fraction of strings whose codeword length exceeds M * a.
double exceed_fraction(const StringSet& strings, const SymbolModel& p, double q,
                       double a, LengthSource source = LengthSource::kAnalytic,
                       int precision = kDefaultPrecision, unsigned threads = 1);

}  // namespace acq

#endif  // ACQ_THRESHOLD_HPP
