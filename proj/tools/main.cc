#include <iostream>

#include "bsnake/cli.h"

int main(int argc, char** argv) {
  return bsnake::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
