// SPDX-License-Identifier: Apache-2.0
//
// Subcommand definitions of the ab-lab command line.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ablab/error.hpp"
#include "report.hpp"

namespace ablab::cli {

/// Invalid configuration; reported with exit status 64.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CommonOptions {
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "both";
  unsigned threads = 0;
  std::string config;
};

struct Command {
  CLI::App* app = nullptr;
  std::string id;  // e.g. "furstenberg dimension"
  CommonOptions common;
  std::function<Report()> run;
};

/// Registers every subcommand on `app`. The returned objects own the option
/// storage and must outlive parsing.
std::vector<std::unique_ptr<Command>> register_commands(CLI::App& app);

/// Full parse-and-run entry point; returns the process exit status.
int run_cli(std::vector<std::string> args);

/// Parses "a,b,c" into numbers; names `field` in the error.
std::vector<double> parse_list(const std::string& text, const std::string& field);

}  // namespace ablab::cli
