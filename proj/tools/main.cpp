#include <vector>

#include "ctrecov/cli.hpp"

int main(int argc, char** argv) {
  return ctrecov::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
