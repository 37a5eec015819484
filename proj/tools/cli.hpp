#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weakrand::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kInfeasible = 3,
    kIo = 4,
};

/// Runs the tool with `args` (excluding the program name). Data goes to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weakrand::cli
