#include "pwbench/cli.hpp"

int main(int argc, char** argv) { return pwbench::cli::cli_dispatch(argc, argv); }
