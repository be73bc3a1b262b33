#include <iostream>

#include "cli.h"

int main(int argc, char** argv) {
  return llmdep::cli::RunCli(argc, argv, std::cout, std::cerr);
}
