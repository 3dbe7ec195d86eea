#include <iostream>
#include <string>
#include <vector>

#include "qrc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qrc::cli::run(args, std::cout, std::cerr);
}
