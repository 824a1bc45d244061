#pragma once

namespace subsam {

// Entry point for the command-line tool. Parses argv, runs one subcommand,
// and writes results to --out (or stdout). Returns the process exit code:
// 0 success, 1 usage error (message on stderr), 2 runtime failure.
int run_cli(int argc, const char* const* argv);

}  // namespace subsam
