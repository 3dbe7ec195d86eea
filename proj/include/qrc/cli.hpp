#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qrc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitData = 4;

// Runs one command line; `args` excludes the program name. Reports go to
// `out`, diagnostics to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Expands "0,0.5,1" or "start:stop:step" (inclusive) into grid values.
std::vector<double> parse_grid_values(const std::string& spec);

}  // namespace qrc::cli
