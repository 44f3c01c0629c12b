#include <iostream>

#include "tnare/cli/commands.hpp"

int main(int argc, char** argv) { return tnare::cli::run(argc, argv, std::cout, std::cerr); }
