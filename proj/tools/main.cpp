#include <iostream>
#include <string>
#include <vector>

#include "losslim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return losslim::run_cli(args, std::cout, std::cerr);
}
