#ifndef ACQ_MODEL_HPP
#define ACQ_MODEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace acq {

/// Tolerance window around q = 1 inside which Rényi-type quantities use the
/// Shannon (limit) formula instead of the 1/(1-q) form.
inline constexpr double kShannonWindow = 1e-4;

/// Exact probability p_i = numerator / denominator.
struct Rational {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
};

/// A static source distribution over an alphabet with full support.
///
/// Probabilities are always derived from positive integer weights (the
/// occurrence counts when estimated from data), so p_i = n_i / W is exact and
/// the p_i sum to one exactly. Zero-weight symbols are not representable;
/// estimate_model() drops them and reports a remapping.
///
/// Immutable after construction.
class SymbolModel {
 public:
  /// Throws DataError if a count is zero, the vectors disagree in size,
  /// the alphabet is empty, or the total overflows 64 bits.
  SymbolModel(std::vector<std::string> alphabet,
              std::vector<std::uint64_t> counts);

  /// Model with symbol names "0", "1", ... for the given positive weights.
  static SymbolModel from_weights(std::vector<std::uint64_t> weights);

  std::size_t size() const { return counts_.size(); }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  Rational probability(std::size_t i) const { return {counts_[i], total_}; }

  /// Real-valued view of the exact probabilities.
  std::span<const double> probs() const { return probs_; }

  bool operator==(const SymbolModel& other) const {
    return alphabet_ == other.alphabet_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> alphabet_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::vector<double> probs_;
};

/// A model estimated from a symbol stream. remap[old_id] is the id in
/// model, or -1 when the symbol never occurred and was dropped.
struct EstimatedModel {
  SymbolModel model;
  std::vector<std::int64_t> remap;
};

/// Counts occurrences of each id in [0, alphabet_size). When alphabet is
/// empty the symbols are named by their original ids.
EstimatedModel estimate_model(std::span<const std::uint32_t> stream,
                              std::size_t alphabet_size,
                              const std::vector<std::string>& alphabet = {});

/// Escort (zooming) distribution p_i^q / sum_j p_j^q. q = 1 returns p
/// unchanged, q = 0 the uniform distribution over the support of p.
std::vector<double> escort(std::span<const double> p, double q);
inline std::vector<double> escort(const SymbolModel& p, double q) {
  return escort(p.probs(), q);
}

/// log2(sum_i p_i^q) over the support of p, accumulated in log domain.
double log2_power_sum(std::span<const double> p, double q);

/// All entropies are in bits.
double shannon_entropy(std::span<const double> p);
double renyi_entropy(std::span<const double> p, double q);
inline double renyi_entropy(const SymbolModel& p, double q) {
  return renyi_entropy(p.probs(), q);
}

/// Campbell's optimal escort order q = 1 / (1 + t) for exponent t > -1.
double campbell_q(double t);

/// -sum_i f_i log2 r_i. Throws DataError("unsupported symbol") if some
/// f_i > 0 has r_i == 0.
double cross_entropy(std::span<const double> f, std::span<const double> r);
double kl_divergence(std::span<const double> f, std::span<const double> r);

/// Exponential average codeword length per symbol when symbols drawn from p
/// are coded with the escort of r:
///   (q/(1-q)) log2 sum_i p_i r_i^{q-1} + (1-q) H_q[r].
/// Near q = 1 this is the cross-entropy. Accepts any q > 0.
double exp_cross_entropy(std::span<const double> p, std::span<const double> r,
                         double q);

/// Excess exponential length H_q[p||r] - H_q[p] caused by coding with r.
double er_q(std::span<const double> p, std::span<const double> r, double q);

/// JSON form {version, alphabet, counts, total}; probabilities are always
/// re-derived from the counts.
nlohmann::json model_to_json(const SymbolModel& m);
SymbolModel model_from_json(const nlohmann::json& j);

SymbolModel load_model(const std::string& path);
void save_model(const SymbolModel& m, const std::string& path);

}  // namespace acq

#endif  // ACQ_MODEL_HPP
