#ifndef ACQ_ANALYSIS_HPP
#define ACQ_ANALYSIS_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "acq/corpus.hpp"
#include "acq/model.hpp"

namespace acq {

/// Pre-ceiling values closer than this to an integer are snapped to it.
inline constexpr double kCeilingTieTolerance = 1e-9;

/// Number of analytic lengths whose pre-ceiling value was snapped to an
/// integer since start-up (or the last reset).
std::uint64_t ceiling_tie_count();
void reset_ceiling_tie_count();

/// -log2 P(s) = -sum_i n_i(s) log2 p_i, compensated. Throws
/// DataError("unsupported symbol") for ids outside the model.
double information_bits(std::span<const std::uint32_t> s, const SymbolModel& p);

/// Analytic AC_q codeword lengths for one (p, q):
///   ceil(1 + q * info(s) + M * log2 sum_j p_j^q)
/// using the true (unquantized) escort.
class LengthEvaluator {
 public:
  LengthEvaluator(const SymbolModel& p, double q);

  double q() const { return q_; }
  /// Pre-ceiling value 1 - log2 S^(q)(s) for a string of length M with
  /// information `info_bits` = -log2 P(s).
  double pre_ceiling(double info_bits, std::size_t length) const {
    return 1.0 + q_ * info_bits + static_cast<double>(length) * log2_z_;
  }
  std::uint32_t length_from_info(double info_bits, std::size_t length) const;
  std::uint32_t length(std::span<const std::uint32_t> s) const;

 private:
  const SymbolModel* model_;
  double q_;
  double log2_z_;
};

std::uint32_t analytic_length(std::span<const std::uint32_t> s,
                              const SymbolModel& p, double q);

/// f(s) = n_i(s) / M over the model's alphabet size.
std::vector<double> empirical_counts(std::span<const std::uint32_t> s,
                                     std::size_t alphabet_size);

/// (pre-ceiling analytic length - 1) - M * H1[f(s) || escort(p, q)];
/// zero up to rounding.
double cross_entropy_identity_check(std::span<const std::uint32_t> s,
                                    const SymbolModel& p, double q);

/// (1/t) log2 sum_j w_j 2^{t l_j}, evaluated with a max shift. |t| < 1e-9
/// gives the (weighted) arithmetic mean. Weights default to 1/n.
/// Throws DomainError for empty input or t <= -1.
double exp_avg_length(std::span<const double> lengths, double t,
                      std::span<const double> weights = {});

/// Length -> number of strings with that length.
using LengthHistogram = std::map<std::uint32_t, std::uint64_t>;
double exp_avg_length(const LengthHistogram& histogram, double t);

/// Codeword lengths for a q-grid by string collection.
struct LengthMatrix {
  std::vector<double> q_grid;
  std::size_t length = 0;        // M
  std::size_t string_count = 0;  // eta
  /// Row-major q_grid.size() x string_count; empty when not kept.
  std::vector<std::uint32_t> lengths;
  /// One histogram per q, always present.
  std::vector<LengthHistogram> histograms;

  std::uint32_t at(std::size_t qi, std::size_t j) const {
    return lengths[qi * string_count + j];
  }
  std::span<const std::uint32_t> row(std::size_t qi) const {
    return std::span<const std::uint32_t>(lengths).subspan(qi * string_count,
                                                           string_count);
  }
};

struct SweepResult {
  double t = 0.0;
  double q_t = 1.0;
  std::vector<double> l_emp;  // one entry per q_grid point
  double argmin_q = 0.0;      // grid argmin
  double refined_argmin_q = 0.0;  // golden-section between grid neighbours
  double renyi_line = 0.0;    // M * H_{q_t}[p]
  double l_emp_at_qt = 0.0;   // evaluated at q_t itself, on or off grid
  double gap_at_qt = 0.0;     // l_emp_at_qt - renyi_line
};

struct SweepOptions {
  unsigned threads = 1;
  bool keep_matrix = true;
  bool refine = true;
};

struct SweepOutput {
  LengthMatrix matrix;
  std::vector<SweepResult> results;
};

/// {start, start + step, ...} up to and including stop (within 1e-9).
std::vector<double> make_q_grid(double start = 0.0, double stop = 2.0,
                                double step = 0.1);

/// Per-string -log2 P(s); the only string-dependent input to every length.
std::vector<double> string_information(const StringSet& strings,
                                       const SymbolModel& p,
                                       unsigned threads = 1);

/// Empirical exponential average over strings at one (q, t), from
/// precomputed informations.
double empirical_exp_length(std::span<const double> informations,
                            std::size_t length, const SymbolModel& p, double q,
                            double t);

/// Fills the length matrix over q_grid and evaluates the empirical
/// exponential average for every t. Throws DataError for an empty string set
/// and DomainError for an empty or unsorted grid.
SweepOutput sweep(const StringSet& strings, const SymbolModel& p,
                  const std::vector<double>& q_grid,
                  const std::vector<double>& t_list,
                  const SweepOptions& options = {});

/// L_emp(t, 1) - L_emp(t, q_t). Positive when AC_{q_t} beats classic AC.
double cost_advantage(const StringSet& strings, const SymbolModel& p, double t,
                      unsigned threads = 1);

}  // namespace acq

#endif  // ACQ_ANALYSIS_HPP
