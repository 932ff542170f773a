#include <iostream>

#include "hardem_cli/cli.h"

int main(int argc, char** argv) {
  return hardem::cli::run(argc, argv, std::cout, std::cerr);
}
