#ifndef ACQ_CORPUS_HPP
#define ACQ_CORPUS_HPP

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acq/model.hpp"

namespace acq {

/// Fixed-length strings stored contiguously (string j occupies
/// symbols[j*M, (j+1)*M)).
class StringSet {
 public:
  StringSet() = default;
  /// symbols.size() must be a multiple of length (length >= 1).
  StringSet(std::size_t length, std::vector<std::uint32_t> symbols);
  /// Throws DataError("ragged strings") unless all strings share a length.
  static StringSet from_strings(const std::vector<std::vector<std::uint32_t>>& strings);

  std::size_t length() const { return length_; }
  std::size_t size() const { return length_ == 0 ? 0 : symbols_.size() / length_; }
  bool empty() const { return size() == 0; }
  std::span<const std::uint32_t> operator[](std::size_t j) const {
    return std::span<const std::uint32_t>(symbols_).subspan(j * length_, length_);
  }
  const std::vector<std::uint32_t>& symbols() const { return symbols_; }

 private:
  std::size_t length_ = 0;
  std::vector<std::uint32_t> symbols_;
};

/// How raw bytes map to symbol ids.
///
///   fil9_27    'a'..'z' -> 0..25, ' ' -> 26; everything else dropped
///   bytes_256  every byte value is its own id
///   custom     the listed bytes in order, e.g. "custom:abc"; or the
///              alphabet of an existing model
///
/// Symbol names are the byte itself when it is printable ASCII, otherwise
/// "0xNN".
class AlphabetSpec {
 public:
  static AlphabetSpec fil9_27();
  static AlphabetSpec bytes_256();
  static AlphabetSpec custom(std::string_view bytes);
  /// Accepts "fil9_27", "bytes_256" or "custom:<bytes>".
  static AlphabetSpec parse(std::string_view text);
  /// Uses the model's symbol names; each must name a single byte.
  static AlphabetSpec from_model(const SymbolModel& model);

  const std::vector<std::string>& symbols() const { return names_; }
  std::size_t size() const { return names_.size(); }
  /// -1 if the byte is outside the alphabet.
  int id_of(unsigned char byte) const { return table_[byte]; }
  unsigned char byte_of(std::uint32_t id) const { return bytes_[id]; }

 private:
  explicit AlphabetSpec(std::string_view bytes);

  std::vector<std::string> names_;
  std::vector<unsigned char> bytes_;
  std::array<int, 256> table_{};
};

/// Printable ASCII byte as itself, else "0xNN".
std::string byte_symbol_name(unsigned char byte);
/// Inverse of byte_symbol_name. Throws DataError for other strings.
unsigned char parse_byte_symbol(const std::string& name);

struct Corpus {
  std::vector<std::uint32_t> symbol_ids;
  std::vector<std::string> alphabet;
  std::string origin;
  std::uint64_t dropped_bytes = 0;
};

/// Maps bytes through the alphabet, dropping (and counting) the rest.
Corpus ingest_bytes(std::string_view bytes, const AlphabetSpec& spec,
                    std::string origin = "memory");
/// Throws DataError if the file is unreadable or nothing survives filtering.
Corpus ingest_text(const std::string& path, const AlphabetSpec& spec);

/// Splits into floor(len / M) strings of length M; the tail is discarded.
StringSet chunk(const Corpus& corpus, std::size_t length);
StringSet chunk(std::span<const std::uint32_t> ids, std::size_t length);

/// Renders ids back to bytes.
std::string render(std::span<const std::uint32_t> ids, const AlphabetSpec& spec);

/// SplitMix64 finalizer, used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Walker/Vose alias table: O(1) draws from a discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probs);
  std::uint32_t sample(std::mt19937_64& rng) const;
  std::size_t size() const { return accept_.size(); }

 private:
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

/// Strings generated per RNG block in generate_iid.
inline constexpr std::size_t kStringsPerBlock = 1024;

/// `count` strings of length M with i.i.d. symbols drawn from p.
///
/// Generator: std::mt19937_64. Strings are grouped in blocks of
/// kStringsPerBlock; block b uses the engine seeded with
/// splitmix64(seed + (b + 1) * 0x9E3779B97F4A7C15). Each symbol takes two
/// draws (alias column, then acceptance coin). The output depends only on
/// (p, count, M, seed), never on the thread count.
Corpus generate_iid(const SymbolModel& p, std::size_t count, std::size_t length,
                    std::uint64_t seed, unsigned threads = 1);

}  // namespace acq

#endif  // ACQ_CORPUS_HPP
