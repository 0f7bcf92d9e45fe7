#include <iostream>

#include "odlae/cli.hpp"

int main(int argc, char** argv) { return odlae::run_cli(argc, argv, std::cout, std::cerr); }
