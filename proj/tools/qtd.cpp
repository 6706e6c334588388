#include <iostream>

#include "qtd/cli.hpp"

int main(int argc, char** argv) { return qtd::run_cli(argc, argv, std::cout, std::cerr); }
