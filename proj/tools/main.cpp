#include "shs/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return shs::run_cli(argc, argv, std::cout, std::cerr); }
