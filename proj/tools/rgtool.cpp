#include <iostream>

#include "rg/cli.hpp"

int main(int argc, char** argv) { return rg::run_cli(argc, argv, std::cout, std::cerr); }
