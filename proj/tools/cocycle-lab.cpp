#include "cocycle_lab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cocycle_lab::cli::run(argc, argv, std::cout, std::cerr); }
