// Copyright 2026 The isothc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// RFC-4180 CSV tables and atomic file output.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isothc {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Parses quoted fields, doubled quotes, and embedded separators/newlines.
/// The first record is the header.
CsvTable parse_csv(std::istream& in);

/// Quotes a field when it holds a comma, quote, CR, or LF.
std::string csv_escape(const std::string& field);

/// CRLF-terminated records with a header row.
std::string format_csv(const CsvTable& table);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace isothc
