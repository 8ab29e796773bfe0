#include "exitlab/cli.hpp"

int main(int argc, char** argv) { return exitlab::cli::run_cli(argc, argv); }
