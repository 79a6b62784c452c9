#include <iostream>

#include "bgfit/cli.hpp"

int main(int argc, char** argv) { return bgfit::cli::run(argc, argv, std::cout, std::cerr); }
