#include <iostream>

#include "erralign/cli.hpp"

int main(int argc, char** argv) { return erralign::run_cli(argc, argv, std::cout, std::cerr); }
