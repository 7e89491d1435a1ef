#include <iostream>

#include "mew/cli.hpp"

int main(int argc, char** argv) { return mew::cli::run(argc, argv, std::cout, std::cerr); }
