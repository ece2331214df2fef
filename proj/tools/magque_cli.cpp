#include <iostream>

#include "magque/cli.hpp"

int main(int argc, char** argv) { return magque::run_cli(argc, argv, std::cout, std::cerr); }
