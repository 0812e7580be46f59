#include <iostream>

#include "lorenz_cli/app.hpp"

int main(int argc, char** argv) {
  return lorenz::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
