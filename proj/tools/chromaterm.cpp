#include <chromaterm/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return chromaterm::run_cli(argc, argv, std::cout, std::cerr); }
