#pragma once

namespace pvchart {

// Command-line entry point (subcommands: bounds, simulate, density, localize).
// Returns a process exit status; diagnostics go to stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace pvchart
