#include <iostream>
#include <string>
#include <vector>

#include "rrt/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return rrt::cli::Run(args, std::cout, std::cerr);
}
