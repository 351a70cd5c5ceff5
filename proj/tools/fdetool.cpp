#include <iostream>

#include "fde/cli.hpp"

int main(int argc, char** argv) { return fde::run_cli(argc, argv, std::cout, std::cerr); }
