#include <iostream>

#include "circform/cli.hpp"

int main(int argc, char** argv) { return circform::cli::main(argc, argv, std::cout, std::cerr); }
