#include <iostream>

#include "toeplitz_forge/cli/commands.hpp"

int main(int argc, char** argv) { return toeplitz_forge::cli::main_entry(argc, argv, std::cout, std::cerr); }
