#ifndef ACQ_IO_HPP
#define ACQ_IO_HPP

#include <string>

namespace acq {

/// Whole file as bytes. Throws DataError if unreadable.
std::string read_file(const std::string& path);

/// Writes to a sibling temp file, then renames over path.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace acq

#endif  // ACQ_IO_HPP
