#include <iostream>

#include "fractalvec/cli.hpp"

int main(int argc, char** argv) { return fractalvec::cli::run(argc, argv, std::cout, std::cerr); }
