#include <iostream>

#include "amvs/cli.hpp"

int main(int argc, char** argv) { return amvs::run_cli(argc, argv, std::cout, std::cerr); }
