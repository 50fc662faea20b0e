#include <iostream>

#include "guesswork/cli.hpp"

int main(int argc, char** argv) { return guesswork::cli::run(argc, argv, std::cout, std::cerr); }
