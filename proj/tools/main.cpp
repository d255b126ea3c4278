#include <iostream>

#include "clamped/cli.hpp"

int main(int argc, char** argv) { return clamped::cli::run(argc, argv, std::cout, std::cerr); }
