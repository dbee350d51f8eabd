#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace twobit {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Environment variable naming the directory used to cache probability tables.
inline constexpr const char* kTableCacheEnv = "TWOBIT_TABLE_CACHE";

/// Parses "a,b,c" or "lo:hi:step" (inclusive of hi up to rounding).
std::vector<double> parse_grid(std::string_view text);

/// Shortest round-trip decimal form, used for every CSV number.
std::string format_double(double x);

/// Runs the tool; diagnostics go to err as a single line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

} // namespace twobit
