#include <iostream>
#include <string>
#include <vector>

#include "psums/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return psums::cli::run(args, std::cout, std::cerr);
}
