#include <iostream>

#include "chubanov/cli.hpp"

int main(int argc, char** argv) { return chubanov::run_cli(argc, argv, std::cout, std::cerr); }
