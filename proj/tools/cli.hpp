#pragma once

// Batch front end: `cyclores <command> [options]`.

#include <iosfwd>

namespace cyclores::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInvalid = 2,
    kNotUnitary = 3,
    kNoRoot = 4,
    kQuadrature = 5,
};

/// Parses argv, runs the command and writes its output to `out` (or to the
/// file named by --output). Diagnostics go to `err`. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cyclores::cli
