#ifndef ACQ_CONTAINER_HPP
#define ACQ_CONTAINER_HPP

#include <cstdint>
#include <string>

#include "acq/coder.hpp"

namespace acq {

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 38;

/// On-disk layout, all integers big-endian:
///
///   offset size  field
///   0      4     magic "ACQ1"
///   4      1     version (1)
///   5      1     precision K
///   6      8     q, IEEE-754 double
///   14     8     message length M
///   22     8     model fingerprint
///   30     8     payload bit count
///   38     ...   payload bits, MSB-first, zero padded to a byte
///
/// The symbol model itself is stored separately as JSON.
struct Container {
  int precision = kDefaultPrecision;
  double q = 1.0;
  Codeword codeword;
};

std::string serialize_container(const Container& c);

/// Throws DataError("corrupt container") on a bad magic, unknown version,
/// truncated payload, trailing bytes, or non-zero padding bits.
Container parse_container(const std::string& bytes);

}  // namespace acq

#endif  // ACQ_CONTAINER_HPP
