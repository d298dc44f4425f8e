#include <iostream>
#include <string>
#include <vector>

#include "specmatch/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return specmatch::cli::run(args, std::cout, std::cerr);
}
