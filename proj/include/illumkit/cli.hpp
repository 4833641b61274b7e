#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace illumkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs the `illumkit` command line. args excludes the program name.
// Returns the process exit code: 0 success, 1 runtime failure, 2 usage or
// configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace illumkit
