/*
 * Copyright (c) 2026 The acp-aoi Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at:
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "acp/app/csv.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "acp/error.hpp"

namespace acp::app {

CsvWriter::CsvWriter(const std::string& path, std::string_view kind,
                     std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc),
      columns_(header.size()) {
  if (!out_) fail(Errc::kInvalidArgument, fmt::format("cannot write '{}'", path));
  out_ << fmt::format("# acp-csv v{} kind={}\n", kCsvVersion, kind);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    fail(Errc::kInvalidArgument,
         fmt::format("row with {} cells for {} columns in '{}'", cells.size(),
                     columns_, path_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    // Cells never contain separators except free-text diagnostics.
    if (cells[i].find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : cells[i]) {
        if (ch == '"') quoted += '"';
        quoted += ch == '\n' ? ' ' : ch;
      }
      out_ << quoted << '"';
    } else {
      out_ << cells[i];
    }
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) fail(Errc::kInvalidArgument, fmt::format("error writing '{}'", path_));
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.9g}", v);
}
std::string num(std::uint64_t v) { return fmt::format("{}", v); }
std::string num(std::int64_t v) { return fmt::format("{}", v); }
std::string num(int v) { return fmt::format("{}", v); }

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(Errc::kSchema, fmt::format("column '{}' missing from kind={} table", name, kind));
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kSchema, fmt::format("cannot read '{}'", path));
  std::string line;
  if (!std::getline(in, line)) fail(Errc::kSchema, fmt::format("'{}' is empty", path));

  CsvTable t;
  constexpr std::string_view kPrefix = "# acp-csv v";
  if (!line.starts_with(kPrefix)) {
    fail(Errc::kSchema, fmt::format("'{}' has no acp-csv version line", path));
  }
  std::string_view rest = std::string_view(line).substr(kPrefix.size());
  const auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), t.version);
  if (ec != std::errc{}) {
    fail(Errc::kSchema, fmt::format("'{}' has a malformed version line", path));
  }
  if (t.version != kCsvVersion) {
    fail(Errc::kSchema, fmt::format("'{}' is schema v{}, expected v{}", path,
                                    t.version, kCsvVersion));
  }
  rest = rest.substr(p - rest.data());
  constexpr std::string_view kKind = " kind=";
  if (!rest.starts_with(kKind)) {
    fail(Errc::kSchema, fmt::format("'{}' does not name its kind", path));
  }
  t.kind = std::string(rest.substr(kKind.size()));
  while (!t.kind.empty() && t.kind.back() == '\r') t.kind.pop_back();

  if (!std::getline(in, line)) {
    fail(Errc::kSchema, fmt::format("'{}' has no header row", path));
  }
  t.header = split_row(line);
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != t.header.size()) {
      fail(Errc::kSchema, fmt::format("{}:{}: {} cells for {} columns", path,
                                      line_no, cells.size(), t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

double cell_double(const std::string& cell) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || p != cell.data() + cell.size()) {
    fail(Errc::kSchema, fmt::format("'{}' is not a number", cell));
  }
  return v;
}

}  // namespace acp::app
