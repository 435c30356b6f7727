#include "clockcast/cli.hpp"

int main(int argc, char** argv) {
  return clockcast::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
