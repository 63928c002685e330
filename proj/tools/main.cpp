#include "tfq/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return tfq::cli::run(argc, argv, std::cout, std::cerr);
}
