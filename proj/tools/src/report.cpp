// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ablab/error.hpp"

namespace ablab::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error("table " + name + ": row width mismatch");
  rows.push_back(std::move(row));
}

void Report::check(std::string name, bool ok, Status otherwise, double value, double tolerance,
                   std::string detail) {
  verdicts.push_back(
      {std::move(name), ok ? Status::kPass : otherwise, value, tolerance, std::move(detail)});
}

Status Report::status() const {
  Status s = Status::kPass;
  for (const auto& v : verdicts) s = std::max(s, v.status);
  return s;
}

int Report::exit_code() const {
  switch (status()) {
    case Status::kPass: return 0;
    case Status::kWarn: return 2;
    case Status::kFail: return 1;
  }
  return 1;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_real(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return std::to_string(v);
        }
      },
      c);
}

const char* status_name(Status s) {
  switch (s) {
    case Status::kPass: return "pass";
    case Status::kWarn: return "warn";
    case Status::kFail: return "fail";
  }
  return "fail";
}

std::string csv_body(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

namespace {

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error("cannot write " + path.string());
}

}  // namespace

nlohmann::ordered_json to_json(const Report& r, const std::string& generated) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = r.command;
  j["generated"] = generated;
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  auto& tables = j["tables"] = nlohmann::ordered_json::object();
  for (const auto& t : r.tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json jr = nlohmann::ordered_json::array();
      for (const auto& c : row) jr.push_back(cell_json(c));
      rows.push_back(std::move(jr));
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
  }
  j["metrics"] = r.metrics;
  auto& verdicts = j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"status", status_name(v.status)},
                        {"value", v.value},
                        {"tolerance", v.tolerance},
                        {"detail", v.detail}});
  }
  j["status"] = status_name(r.status());
  return j;
}

std::vector<std::filesystem::path> emit(const Report& r, const std::filesystem::path& prefix,
                                        Format format) {
  if (r.tables.empty()) throw Error("no results to write");
  for (const auto& t : r.tables) {
    if (t.rows.empty()) throw Error("no results to write (table " + t.name + " is empty)");
  }
  const std::string generated = timestamp();
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (format != Format::kJson) {
    std::ostringstream head;
    head << "# ab-lab " << kVersion << '\n' << "# command: " << r.command << '\n';
    for (const auto& [k, v] : r.config) head << "# " << k << " = " << v << '\n';
    head << "# generated: " << generated << '\n';
    for (const auto& t : r.tables) {
      auto path = prefix;
      path += r.tables.size() == 1 ? ".csv" : "_" + t.name + ".csv";
      files.emplace_back(path, head.str() + "# table: " + t.name + '\n' + csv_body(t));
    }
  }
  if (format != Format::kCsv) {
    auto path = prefix;
    path += ".json";
    files.emplace_back(path, to_json(r, generated).dump(2) + '\n');
  }
  const auto dir = prefix.parent_path();
  if (!dir.empty() && !std::filesystem::is_directory(dir)) {
    throw Error("cannot write " + prefix.string() + ": no such directory");
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    write_file(path, text);
    written.push_back(path);
  }
  return written;
}

}  // namespace ablab::cli
