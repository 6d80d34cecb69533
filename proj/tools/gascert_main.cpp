#include <iostream>

#include "gascert/cli.hpp"

int main(int argc, char** argv) { return gascert::cli_main(argc, argv, std::cout, std::cerr); }
