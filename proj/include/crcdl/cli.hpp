#pragma once

namespace crcdl {

/**
 * Entry point for the crcdl command line tool (subcommands: simulate, fit,
 * summarize, diag, export). Returns the process exit code: 0 on success, 2
 * for input or configuration errors, 3 for sampler failures, 4 when a
 * diagnostics precondition is not met.
 */
int run_cli(int argc, char** argv);

}  // namespace crcdl
