#pragma once

#include <ostream>

namespace fractalvec::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { ok = 0, solver_failure = 1, precondition_failure = 2, verification_failure = 3 };

/// Entry point shared by the executable and the tests:
///   fractalvec {build|solve|spectrum} --config FILE [--out DIR] [-v]
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fractalvec::cli
