#include <iostream>

#include "wfshap/cli.hpp"

int main(int argc, char** argv) { return wfshap::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
