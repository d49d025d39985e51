#include "acq/container.hpp"

#include <bit>
#include <cstring>

#include "acq/error.hpp"

namespace acq {
namespace {

constexpr char kMagic[4] = {'A', 'C', 'Q', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xffu));
  }
}

std::uint64_t get_u64(const std::string& in, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    v = (v << 8) | static_cast<unsigned char>(in[offset + i]);
  }
  return v;
}

[[noreturn]] void corrupt(const char* why) {
  throw DataError(std::string("corrupt container: ") + why);
}

}  // namespace

std::string serialize_container(const Container& c) {
  const Codeword& cw = c.codeword;
  std::string out;
  out.reserve(kContainerHeaderSize + cw.bytes.size());
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kContainerVersion));
  out.push_back(static_cast<char>(c.precision));
  put_u64(out, std::bit_cast<std::uint64_t>(c.q));
  put_u64(out, cw.message_len);
  put_u64(out, cw.model_fingerprint);
  put_u64(out, cw.bit_count);
  out.append(reinterpret_cast<const char*>(cw.bytes.data()), cw.bytes.size());
  return out;
}

Container parse_container(const std::string& bytes) {
  if (bytes.size() < kContainerHeaderSize) corrupt("truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) corrupt("bad magic");
  if (static_cast<std::uint8_t>(bytes[4]) != kContainerVersion) {
    corrupt("unsupported version");
  }
  Container c;
  c.precision = static_cast<std::uint8_t>(bytes[5]);
  c.q = std::bit_cast<double>(get_u64(bytes, 6));
  c.codeword.message_len = get_u64(bytes, 14);
  c.codeword.model_fingerprint = get_u64(bytes, 22);
  c.codeword.bit_count = get_u64(bytes, 30);
  const std::uint64_t bits = c.codeword.bit_count;
  if (bits > (bytes.size() - kContainerHeaderSize) * 8) corrupt("truncated payload");
  const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
  if (kContainerHeaderSize + nbytes != bytes.size()) corrupt("trailing bytes");
  c.codeword.bytes.assign(bytes.begin() + kContainerHeaderSize, bytes.end());
  if (bits % 8 != 0) {
    const auto mask = static_cast<std::uint8_t>(0xffu >> (bits % 8));
    if (c.codeword.bytes.back() & mask) corrupt("non-zero padding");
  }
  return c;
}

}  // namespace acq
