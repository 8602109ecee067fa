#include <iostream>
#include <string>
#include <vector>

#include "openset/cli.hpp"

int main(int argc, char** argv) {
  return openset::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
