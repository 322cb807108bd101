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

#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace acp::app {

inline constexpr int kCsvVersion = 1;

/// Writes a versioned CSV: a `# acp-csv v1 kind=<kind>` line, a header row
/// naming every column with its unit, then data rows. Numbers are formatted
/// with a fixed number of significant digits so reruns are byte-identical.
class CsvWriter {
 public:
  /// Throws kInvalidArgument when the file cannot be opened.
  CsvWriter(const std::string& path, std::string_view kind,
            std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  void close();

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Formats a number for CSV output; NaN becomes an empty cell.
std::string num(double v);
std::string num(std::uint64_t v);
std::string num(std::int64_t v);
std::string num(int v);

struct CsvTable {
  std::string kind;
  int version = 0;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name. Throws kSchema when absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a file written by CsvWriter. Throws kSchema for a missing or
/// foreign version line, a version other than kCsvVersion, a missing header
/// or ragged rows.
CsvTable read_csv(const std::string& path);

/// Parses a numeric cell; empty cells read as NaN. Throws kSchema.
double cell_double(const std::string& cell);

}  // namespace acp::app
