// SPDX-License-Identifier: Apache-2.0
#include "config_file.hpp"

#include <fstream>
#include <sstream>

#include "ablab/error.hpp"

namespace ablab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || key == "config") {
      throw Error("config line " + std::to_string(number) + ": invalid key");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::string> inject_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error("--config: cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto settings = parse_config_text(buf.str());

  std::size_t lead = 0;
  while (lead < args.size() && !args[lead].empty() && args[lead][0] != '-') ++lead;
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(lead));
  for (const auto& [k, v] : settings) {
    out.push_back("--" + k + "=" + v);
  }
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(lead), args.end());
  return out;
}

}  // namespace ablab::cli
