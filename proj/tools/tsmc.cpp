#include "tsmc/cli/commands.hpp"

int main(int argc, char** argv) { return tsmc::cli::run_cli(argc, argv); }
