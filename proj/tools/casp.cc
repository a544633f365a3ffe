#include <casp/cli.hh>

#include <iostream>

auto main(int argc, char **argv) -> int { return Casp::run_cli(argc, argv, std::cout, std::cerr); }
