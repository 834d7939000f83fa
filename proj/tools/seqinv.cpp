#include <iostream>

#include "seqinv/cli.hpp"

int main(int argc, char** argv) { return seqinv::run_cli(argc, argv, std::cout, std::cerr); }
