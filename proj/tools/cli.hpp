#ifndef ACQ_TOOLS_CLI_HPP
#define ACQ_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace acq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// Runs the acq command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// "start:stop:step" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

}  // namespace acq::cli

#endif  // ACQ_TOOLS_CLI_HPP
