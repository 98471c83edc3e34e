#pragma once

#include <ostream>
#include <span>
#include <string>

namespace fuzzyseek {

/// Exit statuses: 0 success, 1 usage, 2 IO or format, 3 invariant or audit
/// failure.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitInvariant = 3 };

/// `args` excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace fuzzyseek
