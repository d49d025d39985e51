#ifndef ACQ_CODER_HPP
#define ACQ_CODER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "acq/model.hpp"

namespace acq {

inline constexpr int kDefaultPrecision = 32;
inline constexpr int kMinPrecision = 8;
inline constexpr int kMaxPrecision = 62;

/// 64-bit FNV-1a over the alphabet, the counts, q printed with 12 decimals,
/// and the precision K. Encoder and decoder must agree on it.
std::uint64_t model_fingerprint(const SymbolModel& model, double q,
                                int precision);

/// Integer escort frequencies summing to 2^K, as used by the coder.
///
/// Invariants: every freq >= 1, sum == 2^K, cum[0] == 0,
/// cum[i+1] == cum[i] + freq[i], cum[N] == 2^K.
class QuantizedModel {
 public:
  /// Validates the invariants; throws DomainError on violation.
  QuantizedModel(std::vector<std::uint64_t> freq, int precision, double q,
                 std::uint64_t fingerprint);

  std::size_t size() const { return freq_.size(); }
  int precision() const { return precision_; }
  std::uint64_t total() const { return std::uint64_t{1} << precision_; }
  double q() const { return q_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  const std::vector<std::uint64_t>& freq() const { return freq_; }
  const std::vector<std::uint64_t>& cum() const { return cum_; }

  /// Symbol whose slot [cum[i], cum[i+1]) contains target (< 2^K).
  std::size_t symbol_for(std::uint64_t target) const;

 private:
  std::vector<std::uint64_t> freq_;
  std::vector<std::uint64_t> cum_;
  int precision_;
  double q_;
  std::uint64_t fingerprint_;
};

/// freq_i = max(1, floor(escort_i * 2^K)) followed by a largest-remainder
/// correction so the frequencies sum to exactly 2^K. Deterministic in
/// (p, q, K). Throws DataError("alphabet too large for precision") when
/// N > 2^K and DomainError when K is outside [8, 62] or q < 0.
QuantizedModel quantize(const SymbolModel& p, double q,
                        int precision = kDefaultPrecision);

/// Exact interval [a, a + S) after j symbols, kept as integers over the
/// common denominator 2^{K j}: a = base / 2^{Kj}, S = width / 2^{Kj}.
class IntervalState {
 public:
  explicit IntervalState(const QuantizedModel& model);

  void push(std::uint32_t symbol);

  std::size_t steps() const { return steps_; }
  const mpz_class& base() const { return base_; }
  const mpz_class& width() const { return width_; }
  /// log2 of the common denominator, K * steps.
  std::size_t scale_bits() const { return scale_bits_; }

  mpq_class base_rational() const;
  mpq_class width_rational() const;

 private:
  const QuantizedModel* model_;
  mpz_class base_ = 0;
  mpz_class width_ = 1;
  std::size_t steps_ = 0;
  std::size_t scale_bits_ = 0;
};

/// Encoded message: the first `bit_count` bits of the binary expansion of
/// a_M + S_M / 2, packed MSB-first into bytes (zero padded).
struct Codeword {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_count = 0;
  std::uint64_t message_len = 0;
  std::uint64_t model_fingerprint = 0;

  bool bit(std::uint64_t i) const {
    return (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  /// Integer v such that the codeword's dyadic value is v / 2^bit_count.
  mpz_class value() const;

  bool operator==(const Codeword&) const = default;
};

/// Final interval of a whole message, built with a balanced product tree.
/// Same result as pushing every symbol through an IntervalState.
struct MessageInterval {
  mpz_class base;
  mpz_class width;
  std::size_t scale_bits = 0;
};
MessageInterval message_interval(std::span<const std::uint32_t> message,
                                 const QuantizedModel& model);

/// Throws DataError("unsupported symbol") for an id >= model.size() and
/// DomainError for an empty message.
Codeword encode(std::span<const std::uint32_t> message,
                const QuantizedModel& model);

/// Throws DataError("model mismatch") when the fingerprints differ and
/// DataError("corrupt codeword") when the bits are not the canonical
/// codeword of the message they decode to.
std::vector<std::uint32_t> decode(const Codeword& codeword,
                                  const QuantizedModel& model);

/// ceil(log2(2 / S_M)) from the exact final width; equals
/// encode(message, model).bit_count.
std::uint64_t codeword_length_exact(std::span<const std::uint32_t> message,
                                    const QuantizedModel& model);

}  // namespace acq

#endif  // ACQ_CODER_HPP
