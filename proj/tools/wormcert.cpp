#include <iostream>

#include "worm/cli.hpp"

int main(int argc, char** argv) { return worm::run_cli(argc, argv, std::cout, std::cerr); }
