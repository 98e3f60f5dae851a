#include <iostream>

#include "wbf/cli/commands.hpp"

int main(int argc, char** argv) { return wbf::cli::run_cli(argc, argv, std::cout, std::cerr); }
