// Apache License, Version 2.0, refer to LICENSE.txt

// Argument parsing for the `mixstock` tool, kept out of main() so tests can
// drive it in-process.

#pragma once

#include <iosfwd>

namespace mixstock {

// Parses argv, runs the selected subcommand and returns the process exit
// code (0 success, 1 usage or validation error, 2 runtime failure).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixstock
