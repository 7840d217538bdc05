#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fbb::cli {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_not_converged = 1,  // divergence, non-convergence, failed certification
    exit_usage = 2,
    exit_io = 3,  // io and parse errors
};

/// Runs the command line `fbb <subcommand> [flags]`; args excludes the
/// program name. Subcommands: gen, solve, compare, certify, frontier, plot.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbb::cli
