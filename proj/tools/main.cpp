#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pisotnorm::cli::run_cli(argc, argv, std::cout, std::cerr); }
