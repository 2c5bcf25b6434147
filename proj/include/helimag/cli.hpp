#pragma once

#include <iosfwd>

namespace helimag {

/// Exit codes of the command-line driver.
enum ExitCode : int {
    exit_success = 0,
    exit_check_failed = 1,
    exit_usage = 2,    ///< bad arguments or configuration
    exit_runtime = 3,  ///< I/O or solver failure
};

/// helimag run <config>
/// helimag verify <config> <trajectory-dir>
/// helimag lab strong-strong|weak-strong <config>
/// Flags --dt, --cells, --scheme, --eps, --out override the configuration.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace helimag
