#include <iostream>

#include "chainlab/cli.hpp"

int main(int argc, char** argv) { return chainlab::run_cli(argc, argv, std::cout, std::cerr); }
