#include <iostream>

#include "hoterm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hoterm::run_cli(args, std::cout, std::cerr);
}
