#pragma once

#include <iosfwd>

namespace paircorr::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    ok = 0,
    numeric_error = 1,
    usage_error = 2,
    not_converged = 3,
    verification_failed = 4,
};

/// Runs one invocation of the `paircorr` tool. Output files go where the
/// flags say; anything without an output path is written to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace paircorr::cli
