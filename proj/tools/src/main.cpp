// SPDX-License-Identifier: Apache-2.0
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ablab::cli::run_cli(std::move(args));
}
