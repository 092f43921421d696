#include <iostream>

#include "parq/cli.hpp"

int main(int argc, char** argv) { return parq::run_cli(argc, argv, std::cout, std::cerr); }
