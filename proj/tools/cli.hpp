#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eecrmt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitBudget = 4;

// Runs one command line (without the program name). Result files go where
// --out points; "-" writes to out. Diagnostics go to err. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// a:b:step, closed on both ends: round((b - a) / step) + 1 equally spaced
// points from a to b. ParamError for step <= 0, b < a or more than 100000 points.
std::vector<double> parse_grid(const std::string& text);

}  // namespace eecrmt::cli
