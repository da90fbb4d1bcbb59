#include <iostream>

#include "dpl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dpl::cli_main(args, std::cin, std::cout, std::cerr);
}
