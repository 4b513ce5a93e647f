#include <iostream>
#include <string>
#include <vector>

#include "banditlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return banditlab::cli::run_cli(args, std::cout, std::cerr);
}
