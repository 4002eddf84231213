#include <iostream>

#include "wnn/cli.hpp"

int main(int argc, char** argv) { return wnn::cli::run(argc, argv, std::cout, std::cerr); }
