#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return kxy::cli::run_cli(argc, argv, std::cout, std::cerr);
}
