#include "acq/coder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "acq/error.hpp"

namespace acq {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_u64(std::uint64_t& h, std::uint64_t v) {
  unsigned char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
  fnv_bytes(h, le, 8);
}

std::size_t bit_length(const mpz_class& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

void check_symbols(std::span<const std::uint32_t> message,
                   const QuantizedModel& model) {
  if (message.empty()) throw DomainError("message must not be empty");
  for (std::uint32_t s : message) {
    if (s >= model.size()) throw DataError("unsupported symbol");
  }
}

MessageInterval interval_tree(std::span<const std::uint32_t> message,
                              const QuantizedModel& model) {
  const int k = model.precision();
  if (message.size() == 1) {
    const std::uint32_t s = message[0];
    MessageInterval leaf;
    leaf.base = mpz_class(static_cast<unsigned long>(model.cum()[s]));
    leaf.width = mpz_class(static_cast<unsigned long>(model.freq()[s]));
    leaf.scale_bits = static_cast<std::size_t>(k);
    return leaf;
  }
  const std::size_t mid = message.size() / 2;
  MessageInterval left = interval_tree(message.first(mid), model);
  MessageInterval right = interval_tree(message.subspan(mid), model);
  MessageInterval out;
  out.base = left.base << right.scale_bits;
  out.base += left.width * right.base;
  out.width = left.width * right.width;
  out.scale_bits = left.scale_bits + right.scale_bits;
  return out;
}

mpz_class width_tree(std::span<const std::uint32_t> message,
                     const QuantizedModel& model) {
  if (message.size() == 1) {
    return mpz_class(static_cast<unsigned long>(model.freq()[message[0]]));
  }
  const std::size_t mid = message.size() / 2;
  return width_tree(message.first(mid), model) *
         width_tree(message.subspan(mid), model);
}

// ceil(log2(2 / S)) with S = width / 2^scale. For width in
// [2^{b-1}, 2^b) this is scale + 2 - b whether or not width is a power of 2.
std::uint64_t length_from_width(const mpz_class& width, std::size_t scale) {
  return static_cast<std::uint64_t>(scale + 2 - bit_length(width));
}

std::vector<std::uint8_t> pack_bits(const mpz_class& v, std::uint64_t bits) {
  const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
  std::vector<std::uint8_t> out(nbytes, 0);
  const mpz_class shifted = v << static_cast<mp_bitcnt_t>(nbytes * 8 - bits);
  std::size_t count = 0;
  std::vector<std::uint8_t> raw((bit_length(shifted) + 7) / 8 + 1);
  mpz_export(raw.data(), &count, 1, 1, 1, 0, shifted.get_mpz_t());
  std::copy(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(count),
            out.end() - static_cast<std::ptrdiff_t>(count));
  return out;
}

}  // namespace

std::uint64_t model_fingerprint(const SymbolModel& model, double q,
                                int precision) {
  std::uint64_t h = kFnvOffset;
  fnv_u64(h, model.size());
  for (const auto& sym : model.alphabet()) {
    fnv_u64(h, sym.size());
    fnv_bytes(h, sym.data(), sym.size());
  }
  for (std::uint64_t c : model.counts()) fnv_u64(h, c);
  char qbuf[64];
  const int n = std::snprintf(qbuf, sizeof qbuf, "%.12f", q);
  fnv_bytes(h, qbuf, static_cast<std::size_t>(n));
  fnv_u64(h, static_cast<std::uint64_t>(precision));
  return h;
}

QuantizedModel::QuantizedModel(std::vector<std::uint64_t> freq, int precision,
                               double q, std::uint64_t fingerprint)
    : freq_(std::move(freq)),
      precision_(precision),
      q_(q),
      fingerprint_(fingerprint) {
  if (precision_ < kMinPrecision || precision_ > kMaxPrecision) {
    throw DomainError("precision K must be in [8, 62]");
  }
  if (freq_.empty()) throw DomainError("empty frequency table");
  cum_.assign(freq_.size() + 1, 0);
  for (std::size_t i = 0; i < freq_.size(); ++i) {
    if (freq_[i] == 0) throw DomainError("zero frequency in quantized model");
    cum_[i + 1] = cum_[i] + freq_[i];
    if (cum_[i + 1] > total()) {
      throw DomainError("frequencies exceed 2^K");
    }
  }
  if (cum_.back() != total()) throw DomainError("frequencies must sum to 2^K");
}

std::size_t QuantizedModel::symbol_for(std::uint64_t target) const {
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  return static_cast<std::size_t>(it - cum_.begin()) - 1;
}

QuantizedModel quantize(const SymbolModel& p, double q, int precision) {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw DomainError("precision K must be in [8, 62]");
  }
  if (q < 0.0) throw DomainError("escort order q must be >= 0");
  const std::size_t n = p.size();
  const std::uint64_t total = std::uint64_t{1} << precision;
  if (n > total) throw DataError("alphabet too large for precision");

  const std::vector<double> e = escort(p, q);
  std::vector<std::uint64_t> freq(n);
  std::vector<long double> remainder(n);
  const long double scale = std::ldexp(1.0L, precision);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double x = static_cast<long double>(e[i]) * scale;
    const long double fl = std::floor(x);
    freq[i] = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(fl));
    remainder[i] = x - static_cast<long double>(freq[i]);
    sum += freq[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (sum < total) {
    // Largest remainders first, index order on ties.
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return remainder[a] > remainder[b];
    });
    std::uint64_t deficit = total - sum;
    while (deficit > 0) {
      for (std::size_t i = 0; i < n && deficit > 0; ++i, --deficit) {
        ++freq[order[i]];
      }
    }
  } else if (sum > total) {
    // Only reachable through the floor-at-1 clamp: take from the entries
    // that lose the least.
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return remainder[a] < remainder[b];
    });
    std::uint64_t excess = sum - total;
    while (excess > 0) {
      bool progressed = false;
      for (std::size_t i = 0; i < n && excess > 0; ++i) {
        if (freq[order[i]] > 1) {
          --freq[order[i]];
          --excess;
          progressed = true;
        }
      }
      if (!progressed) throw DataError("alphabet too large for precision");
    }
  }
  return QuantizedModel(std::move(freq), precision, q,
                        model_fingerprint(p, q, precision));
}

IntervalState::IntervalState(const QuantizedModel& model) : model_(&model) {}

void IntervalState::push(std::uint32_t symbol) {
  if (symbol >= model_->size()) throw DataError("unsupported symbol");
  base_ <<= static_cast<mp_bitcnt_t>(model_->precision());
  base_ += width_ * mpz_class(static_cast<unsigned long>(model_->cum()[symbol]));
  width_ *= mpz_class(static_cast<unsigned long>(model_->freq()[symbol]));
  scale_bits_ += static_cast<std::size_t>(model_->precision());
  ++steps_;
}

mpq_class IntervalState::base_rational() const {
  mpz_class den = mpz_class(1) << scale_bits_;
  mpq_class r(base_, den);
  r.canonicalize();
  return r;
}

mpq_class IntervalState::width_rational() const {
  mpz_class den = mpz_class(1) << scale_bits_;
  mpq_class r(width_, den);
  r.canonicalize();
  return r;
}

mpz_class Codeword::value() const {
  mpz_class v;
  if (!bytes.empty()) {
    mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  v >>= static_cast<mp_bitcnt_t>(bytes.size() * 8 - bit_count);
  return v;
}

MessageInterval message_interval(std::span<const std::uint32_t> message,
                                 const QuantizedModel& model) {
  check_symbols(message, model);
  return interval_tree(message, model);
}

Codeword encode(std::span<const std::uint32_t> message,
                const QuantizedModel& model) {
  const MessageInterval iv = message_interval(message, model);
  const std::uint64_t len = length_from_width(iv.width, iv.scale_bits);
  // k = a + S/2 = (2 base + width) / 2^{scale+1}; keep its first len bits.
  const mpz_class k2 = 2 * iv.base + iv.width;
  const mpz_class v = k2 >> static_cast<mp_bitcnt_t>(bit_length(iv.width) - 1);

  Codeword cw;
  cw.bit_count = len;
  cw.message_len = message.size();
  cw.model_fingerprint = model.fingerprint();
  cw.bytes = pack_bits(v, len);
  return cw;
}

std::vector<std::uint32_t> decode(const Codeword& codeword,
                                  const QuantizedModel& model) {
  if (codeword.model_fingerprint != model.fingerprint()) {
    throw DataError("model mismatch");
  }
  if (codeword.message_len == 0 || codeword.bit_count == 0 ||
      codeword.bytes.size() != (codeword.bit_count + 7) / 8) {
    throw DataError("corrupt codeword");
  }
  // Residual r = (x - a_j) / S_j in [0, 1) as num / den.
  mpz_class num = codeword.value();
  mpz_class den = mpz_class(1) << static_cast<mp_bitcnt_t>(codeword.bit_count);
  if (num >= den) throw DataError("corrupt codeword");

  const auto k = static_cast<mp_bitcnt_t>(model.precision());
  std::vector<std::uint32_t> message;
  message.reserve(static_cast<std::size_t>(codeword.message_len));
  mpz_class scaled;
  mpz_class slot;
  for (std::uint64_t j = 0; j < codeword.message_len; ++j) {
    scaled = num << k;
    mpz_fdiv_q(slot.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    const std::size_t s = model.symbol_for(slot.get_ui());
    message.push_back(static_cast<std::uint32_t>(s));
    num = scaled - mpz_class(static_cast<unsigned long>(model.cum()[s])) * den;
    den *= mpz_class(static_cast<unsigned long>(model.freq()[s]));
  }
  if (encode(message, model) != codeword) throw DataError("corrupt codeword");
  return message;
}

std::uint64_t codeword_length_exact(std::span<const std::uint32_t> message,
                                    const QuantizedModel& model) {
  check_symbols(message, model);
  return length_from_width(
      width_tree(message, model),
      message.size() * static_cast<std::size_t>(model.precision()));
}

}  // namespace acq
