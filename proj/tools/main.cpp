#include <iostream>

#include "nlkg/cli.hpp"

int main(int argc, char** argv) { return nlkg::run_cli(argc, argv, std::cout, std::cerr); }
