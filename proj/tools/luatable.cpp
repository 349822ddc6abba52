#include <iostream>

#include "luatable/cli/commands.hpp"

int main(int argc, char** argv) {
  return luatable::cli::run_cli(argc, argv, std::cout, std::cerr);
}
