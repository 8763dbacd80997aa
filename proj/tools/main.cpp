#include "gcsf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gcsf::run_cli(argc, argv, std::cout, std::cerr); }
