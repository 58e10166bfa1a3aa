#include <iostream>
#include <string>
#include <vector>

#include "convforge/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return convforge::cli::dispatch(args, std::cout, std::cerr);
}
