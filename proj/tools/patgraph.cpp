#include <iostream>
#include <string>
#include <vector>

#include "patgraph/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return patgraph::cli::run(args, std::cout, std::cerr);
}
