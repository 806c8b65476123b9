#include <iostream>

#include "mapind/cli.hpp"

int main(int argc, char** argv) {
  return mapind::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
