#include <iostream>

#include "fourierctl/cli.hpp"

int main(int argc, char** argv) { return fourierctl::run_cli(argc, argv, std::cout, std::cerr); }
