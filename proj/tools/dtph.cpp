#include <iostream>
#include <string>
#include <vector>

#include "dtph/cli.hpp"

int main(int argc, char** argv) {
  return dtph::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
