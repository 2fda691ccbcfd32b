#include <iostream>

#include "netshift_cli/cli.hpp"

int main(int argc, char** argv) { return netshift::cli::run(argc, argv, std::cout, std::cerr); }
