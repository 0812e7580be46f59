#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lorenz::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInvalid = 2 };

/// Runs lorenzfit on the arguments after the program name. Reports go to
/// `out` unless --out names a file; warnings and errors go to `err`.
///
/// Exit codes: 0 success, 1 input/output, parse or convergence failure,
/// 2 a model or fit that is not a genuine Lorenz curve in constrained mode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lorenz::cli
