#include <iostream>

#include "tabstruct/cli.hpp"

int main(int argc, char** argv) { return tabstruct::run_cli(argc, argv, std::cout, std::cerr); }
