#pragma once

#include <iosfwd>

namespace erralign {

/// Exit statuses of the command-line tool.
enum ExitStatus : int { kExitOk = 0, kExitInputError = 1, kExitInternalError = 2 };

/// Entry point behind the `erralign` executable; subcommands score, pairwise,
/// correlate, zscore and synth.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erralign
