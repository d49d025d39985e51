#ifndef ACQ_ERROR_HPP
#define ACQ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace acq {

/// Invalid parameter value (q < 0, t <= -1, a <= 0, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Bad input data: empty corpus, unsupported symbol, corrupt codeword,
/// model mismatch, unreadable file.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace acq

#endif  // ACQ_ERROR_HPP
