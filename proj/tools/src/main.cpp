#include <iostream>

#include "momentsnet_cli/cli.hpp"

int main(int argc, char** argv) {
  return momentsnet::cli::run(argc, argv, std::cout, std::cerr);
}
