#include <iostream>

#include "spinrad/cli.hpp"

int main(int argc, char** argv) { return spinrad::cli::main(argc, argv, std::cout, std::cerr); }
