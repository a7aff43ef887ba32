#pragma once
// Command-line surface. Subcommands: detect, eval, calibrate-demo,
// fit-threshold, guidelines. Results go to `out`; diagnostics to `err`.

#include <iosfwd>
#include <string>
#include <vector>

namespace mgtd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;     // bad flags / unknown subcommand
inline constexpr int kExitData = 65;      // malformed or missing input data
inline constexpr int kExitInternal = 70;  // unexpected internal failure
inline constexpr int kExitGateway = 69;   // backend / parse failures
inline constexpr int kExitConfig = 78;    // bad configuration

// argv without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgtd
