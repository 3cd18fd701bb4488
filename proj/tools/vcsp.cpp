#include <iostream>

#include "vcsp/cli.hpp"

int main(int argc, char** argv) { return vcsp::cli::cli_main(argc, argv, std::cout, std::cerr); }
