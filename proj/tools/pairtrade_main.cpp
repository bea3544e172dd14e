// pairtrade_main.cpp
// Command-line entry point.

#include <iostream>

#include "pairtrade/orchestrator.hpp"

int main(int argc, char** argv) { return pairtrade::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
