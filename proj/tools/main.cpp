#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return arreg::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
