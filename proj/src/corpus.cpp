#include "acq/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "acq/coder.hpp"
#include "acq/error.hpp"
#include "acq/io.hpp"
#include "acq/numeric.hpp"

namespace acq {

StringSet::StringSet(std::size_t length, std::vector<std::uint32_t> symbols)
    : length_(length), symbols_(std::move(symbols)) {
  if (length_ == 0) throw DomainError("string length must be >= 1");
  if (symbols_.size() % length_ != 0) throw DataError("ragged strings");
}

StringSet StringSet::from_strings(
    const std::vector<std::vector<std::uint32_t>>& strings) {
  if (strings.empty()) return {};
  const std::size_t m = strings.front().size();
  std::vector<std::uint32_t> flat;
  flat.reserve(m * strings.size());
  for (const auto& s : strings) {
    if (s.size() != m) throw DataError("ragged strings");
    flat.insert(flat.end(), s.begin(), s.end());
  }
  return StringSet(m, std::move(flat));
}

std::string byte_symbol_name(unsigned char byte) {
  if (byte >= 0x20 && byte < 0x7f) return std::string(1, static_cast<char>(byte));
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02x", byte);
  return buf;
}

unsigned char parse_byte_symbol(const std::string& name) {
  if (name.size() == 1) return static_cast<unsigned char>(name[0]);
  if (name.size() == 4 && name[0] == '0' && (name[1] == 'x' || name[1] == 'X')) {
    unsigned value = 0;
    std::istringstream in(name.substr(2));
    in >> std::hex >> value;
    if (in && in.eof() && value < 256) return static_cast<unsigned char>(value);
  }
  throw DataError("symbol does not name a single byte: " + name);
}

AlphabetSpec::AlphabetSpec(std::string_view bytes) {
  table_.fill(-1);
  for (char c : bytes) {
    const auto b = static_cast<unsigned char>(c);
    if (table_[b] >= 0) throw DomainError("duplicate byte in alphabet");
    table_[b] = static_cast<int>(bytes_.size());
    bytes_.push_back(b);
    names_.push_back(byte_symbol_name(b));
  }
  if (bytes_.empty()) throw DomainError("empty alphabet");
}

AlphabetSpec AlphabetSpec::fil9_27() {
  return AlphabetSpec("abcdefghijklmnopqrstuvwxyz ");
}

AlphabetSpec AlphabetSpec::bytes_256() {
  std::string all(256, '\0');
  for (int i = 0; i < 256; ++i) all[i] = static_cast<char>(i);
  return AlphabetSpec(all);
}

AlphabetSpec AlphabetSpec::custom(std::string_view bytes) {
  return AlphabetSpec(bytes);
}

AlphabetSpec AlphabetSpec::parse(std::string_view text) {
  if (text == "fil9_27") return fil9_27();
  if (text == "bytes_256") return bytes_256();
  constexpr std::string_view prefix = "custom:";
  if (text.starts_with(prefix)) return custom(text.substr(prefix.size()));
  throw DomainError("unknown alphabet spec: " + std::string(text));
}

AlphabetSpec AlphabetSpec::from_model(const SymbolModel& model) {
  std::string bytes;
  for (const auto& name : model.alphabet()) {
    bytes.push_back(static_cast<char>(parse_byte_symbol(name)));
  }
  return AlphabetSpec(bytes);
}

Corpus ingest_bytes(std::string_view bytes, const AlphabetSpec& spec,
                    std::string origin) {
  Corpus c;
  c.alphabet = spec.symbols();
  c.origin = std::move(origin);
  c.symbol_ids.reserve(bytes.size());
  for (char ch : bytes) {
    const int id = spec.id_of(static_cast<unsigned char>(ch));
    if (id < 0) {
      ++c.dropped_bytes;
    } else {
      c.symbol_ids.push_back(static_cast<std::uint32_t>(id));
    }
  }
  return c;
}

Corpus ingest_text(const std::string& path, const AlphabetSpec& spec) {
  Corpus c = ingest_bytes(read_file(path), spec, path);
  if (c.symbol_ids.empty()) throw DataError("empty corpus after filtering: " + path);
  return c;
}

StringSet chunk(std::span<const std::uint32_t> ids, std::size_t length) {
  if (length == 0) throw DomainError("string length must be >= 1");
  const std::size_t count = ids.size() / length;
  return StringSet(length, std::vector<std::uint32_t>(
                               ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(count * length)));
}

StringSet chunk(const Corpus& corpus, std::size_t length) {
  return chunk(corpus.symbol_ids, length);
}

std::string render(std::span<const std::uint32_t> ids, const AlphabetSpec& spec) {
  std::string out;
  out.reserve(ids.size());
  for (std::uint32_t id : ids) {
    if (id >= spec.size()) throw DataError("unsupported symbol");
    out.push_back(static_cast<char>(spec.byte_of(id)));
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

AliasTable::AliasTable(std::span<const double> probs)
    : accept_(probs.size(), 1.0), alias_(probs.size()) {
  const std::size_t n = probs.size();
  if (n == 0) throw DomainError("empty distribution");
  const double total = compensated_sum(probs);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probs[i] / total * static_cast<double>(n);
    alias_[i] = static_cast<std::uint32_t>(i);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::uint32_t i : small) accept_[i] = 1.0;
  for (std::uint32_t i : large) accept_[i] = 1.0;
}

std::uint32_t AliasTable::sample(std::mt19937_64& rng) const {
  const auto column = std::min(
      accept_.size() - 1,
      static_cast<std::size_t>(uniform01(rng) *
                               static_cast<double>(accept_.size())));
  return uniform01(rng) < accept_[column] ? static_cast<std::uint32_t>(column)
                                          : alias_[column];
}

Corpus generate_iid(const SymbolModel& p, std::size_t count, std::size_t length,
                    std::uint64_t seed, unsigned threads) {
  if (count * length < 1) throw DomainError("count * M must be >= 1");
  const AliasTable table(p.probs());
  Corpus c;
  c.alphabet = p.alphabet();
  c.origin = "iid seed=" + std::to_string(seed) + " model=" +
             std::to_string(model_fingerprint(p, 1.0, kDefaultPrecision));
  c.symbol_ids.resize(count * length);
  const std::size_t blocks = (count + kStringsPerBlock - 1) / kStringsPerBlock;
  parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      std::mt19937_64 rng(splitmix64(seed + (b + 1) * 0x9E3779B97F4A7C15ull));
      const std::size_t first = b * kStringsPerBlock * length;
      const std::size_t last =
          std::min(count, (b + 1) * kStringsPerBlock) * length;
      for (std::size_t i = first; i < last; ++i) {
        c.symbol_ids[i] = table.sample(rng);
      }
    }
  });
  return c;
}

}  // namespace acq
