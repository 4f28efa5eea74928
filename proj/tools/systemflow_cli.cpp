#include <iostream>

#include "systemflow/cli.hpp"

int main(int argc, char** argv) { return systemflow::run_cli(argc, argv, std::cout, std::cerr); }
