#include <iostream>
#include <string>
#include <vector>

#include "weakiso/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return weakiso::run_cli(args, std::cout, std::cerr);
}
