#include <iostream>
#include <string>
#include <vector>

#include "cbf/cli.hpp"

int main(int argc, char** argv) {
  return cbf::run_command(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
