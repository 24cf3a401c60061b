#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return wonham::cli::run(argc, argv, std::cout, std::cerr); }
