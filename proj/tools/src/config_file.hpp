// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ablab::cli {

/// key = value lines; '#' starts a comment, blank lines are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// If args contain --config FILE (or --config=FILE), inserts the file's
/// settings as --key value pairs right after the leading subcommand words,
/// so that flags given on the command line take precedence.
std::vector<std::string> inject_config(const std::vector<std::string>& args);

}  // namespace ablab::cli
