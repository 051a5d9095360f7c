#include "grim/cli.hpp"

#include <string>
#include <vector>

int main(int argc, char** argv) {
  return grim::cli::run_command(std::vector<std::string>(argv, argv + argc));
}
