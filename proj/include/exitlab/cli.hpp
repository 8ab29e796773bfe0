#pragma once

namespace exitlab::cli {

// Entry point of the command-line tool. Exit codes: 0 success (and verdict
// pass where the subcommand has one), 1 verdict failure, 2 configuration or
// usage error. Outputs are byte-identical for fixed config and seed,
// whatever the thread count.
int run_cli(int argc, char** argv);

}  // namespace exitlab::cli
