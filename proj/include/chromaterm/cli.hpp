#pragma once

#include <ostream>

namespace chromaterm {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNumerical = 3,
};

/// Entry point of `chromaterm`: subcommands fit, name, extend and eval.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chromaterm
