// SPDX-License-Identifier: Apache-2.0
//
// Result tables, assertion verdicts and their CSV/JSON emission.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ablab::cli {

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

enum class Status { kPass = 0, kWarn = 1, kFail = 2 };

struct Verdict {
  std::string name;
  Status status = Status::kPass;
  double value = 0;
  double tolerance = 0;
  std::string detail;
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Table> tables;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<Verdict> verdicts;

  /// pass if ok, otherwise `otherwise` (warn or fail).
  void check(std::string name, bool ok, Status otherwise, double value, double tolerance,
             std::string detail = {});
  Status status() const;
  /// 0 = all pass, 2 = warnings only, 1 = failure.
  int exit_code() const;
};

enum class Format { kCsv, kJson, kBoth };

/// Shortest text with 17 significant digits, so every double round-trips.
std::string format_real(double x);
std::string format_cell(const Cell& c);
const char* status_name(Status s);

/// CSV body of one table (header row plus data rows, no comment lines).
std::string csv_body(const Table& t);
nlohmann::ordered_json to_json(const Report& r, const std::string& generated);

/// Writes <prefix>.csv (or <prefix>_<table>.csv for several tables) and
/// <prefix>.json. Throws Error on empty results or unwritable paths; nothing
/// is written in that case. Returns the paths written.
std::vector<std::filesystem::path> emit(const Report& r, const std::filesystem::path& prefix,
                                        Format format);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ablab::cli
