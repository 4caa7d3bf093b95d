#include <iostream>
#include <string>
#include <vector>

#include "bz/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bz::run_cli(args, std::cout, std::cerr);
}
