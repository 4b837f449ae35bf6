#include <iostream>

#include "mvd/cli.hpp"

int main(int argc, char** argv) { return mvd::cli::main(argc, argv, std::cout, std::cerr); }
