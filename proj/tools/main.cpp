#include "coqkd/cli/cli.hpp"

int main(int argc, char** argv) { return coqkd::cli::run_cli(argc, argv); }
