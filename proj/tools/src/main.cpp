#include <iostream>

#include "ceo_tools/cli.hpp"

int main(int argc, char** argv) { return ceo::cli::run(argc, argv, std::cout, std::cerr); }
