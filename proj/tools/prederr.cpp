#include <iostream>

#include "prederr/cli.hpp"

int main(int argc, char **argv) {
  return prederr::cli::run(argc, argv, std::cout, std::cerr);
}
