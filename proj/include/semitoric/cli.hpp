#pragma once

#include <iosfwd>

namespace semitoric {

// Exit codes of the command-line frontend.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3 };

// Parses argv, runs one subcommand and returns its exit code. Reports go to
// `out` as JSON (and to the output directory); errors go to `err` as JSON.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace semitoric
