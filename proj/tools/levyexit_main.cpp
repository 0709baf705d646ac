#include <iostream>

#include "levyexit/cli.hpp"

int main(int argc, char** argv) { return levyexit::cli::main_entry(argc, argv, std::cout, std::cerr); }
