#include <iostream>
#include <string>
#include <vector>

#include "bseries/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bseries::cli::run_cli(args, std::cout, std::cerr);
}
