#include <iostream>

#include "isingeq/cli.hpp"

int main(int argc, char** argv) { return isingeq::cli::run(argc, argv, std::cout, std::cerr); }
