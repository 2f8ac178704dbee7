#include <iostream>

#include "vmocap/cli.hpp"

int main(int argc, char** argv) { return vmocap::run_cli(argc, argv, std::cout, std::cerr); }
