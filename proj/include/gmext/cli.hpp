#pragma once

// Command-line front end: classify, solve, sweep, fit, probe.

#include <iosfwd>
#include <map>
#include <string>

namespace gmext {

namespace exit_code {
inline constexpr int existence = 0;
inline constexpr int nonexistence = 1;
inline constexpr int inconclusive = 2;
inline constexpr int bad_config = 64;
inline constexpr int bad_csv = 65;
inline constexpr int solver_failure = 70;
}  // namespace exit_code

/// Flat key=value configuration. '#' starts a comment; blank lines are ignored.
using Config = std::map<std::string, std::string>;

/// Throws std::invalid_argument with the offending line on malformed input.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

/// Entry point used by the executable and by tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gmext
