#include <iostream>

#include "lorenzcode/cli.hpp"

int main(int argc, char** argv) {
  return lzc::cli::run(argc, argv, std::cout, std::cerr);
}
