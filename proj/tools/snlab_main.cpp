#include <iostream>
#include <string>
#include <vector>

#include "snlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return snlab::run(args, std::cout, std::cerr);
}
