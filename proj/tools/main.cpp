#include <iostream>

#include "metastab/cli.hpp"

int main(int argc, char** argv) { return metastab::run_cli(argc, argv, std::cout, std::cerr); }
