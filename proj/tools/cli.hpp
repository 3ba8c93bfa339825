#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmud::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (args[0] is the program name). CSV goes to
// --out when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmud::cli
