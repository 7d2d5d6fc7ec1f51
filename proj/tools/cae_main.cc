#include <iostream>
#include <string>
#include <vector>

#include "cae/cli.h"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cae::RunCli(args, std::cout, std::cerr);
}
