#include <iostream>

#include "hres/cli.hpp"

int main(int argc, char** argv) { return hres::run_cli(argc, argv, std::cout, std::cerr); }
