#include "fracmorph/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fracmorph::cli::run(argc, argv, std::cout, std::cerr); }
