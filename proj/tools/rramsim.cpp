#include <iostream>

#include "rram/cli.hpp"

int main(int argc, char** argv) { return rram::run_cli(argc, argv, std::cout, std::cerr); }
