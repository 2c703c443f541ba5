#include <iostream>

#include "mdagid/cli.hpp"

int main(int argc, char** argv) {
  return mdagid::run_cli(argc, argv, std::cout, std::cerr);
}
