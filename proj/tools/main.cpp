#include <iostream>

#include "willmore/cli.hpp"

int main(int argc, char** argv) { return willmore::run_cli(argc, argv, std::cout, std::cerr); }
