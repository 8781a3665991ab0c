#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) { return edpm::cli::dispatch(argc, argv, std::cout, std::cerr); }
