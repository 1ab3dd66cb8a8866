#include <iostream>
#include <string>
#include <vector>

#include "ofo_cli.hpp"

int main(int argc, char** argv) {
  return ofo::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
