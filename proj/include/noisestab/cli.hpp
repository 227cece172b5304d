#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace noisestab {

enum ExitCode : int { exit_ok = 0, exit_numerical_failure = 1, exit_usage = 2 };

/// Command-line entry point. args excludes the program name.
/// Results go to `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace noisestab
