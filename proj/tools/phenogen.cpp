#include <iostream>
#include <string>
#include <vector>

#include "phenogen/cli/commands.h"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return phenogen::cli::run_cli(args, std::cout, std::cerr);
}
