#pragma once

#include <iosfwd>

namespace systemflow {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitModelError = 1, kExitConfigError = 2 };

/// Entry point of the `systemflow` tool; writes results to `out` (or to the
/// file chosen by --out / SYSTEMFLOW_OUT_DIR) and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace systemflow
