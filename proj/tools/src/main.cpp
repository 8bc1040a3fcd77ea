#include <iostream>

#include "sphereflow/cli/commands.hpp"

int main(int argc, char** argv) { return sphereflow::cli::run_cli(argc, argv, std::cout, std::cerr); }
