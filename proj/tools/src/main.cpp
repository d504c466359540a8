#include <iostream>
#include <string>
#include <vector>

#include "qsa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qsa::cli::main_entry(args, std::cout, std::cerr);
}
