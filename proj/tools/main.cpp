#include "addcomp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return addcomp::cli::run(argc, argv, std::cout, std::cerr); }
