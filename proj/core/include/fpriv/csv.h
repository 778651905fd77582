// Copyright 2026 The fpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal RFC 4180 reader/writer. Fields may be quoted; quotes inside a
// quoted field are doubled. Both LF and CRLF line endings are accepted.

#ifndef FPRIV_CSV_H_
#define FPRIV_CSV_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace fpriv {

using CsvRow = std::vector<std::string>;

// Parses `text` into rows. A trailing newline does not produce an empty row.
// Blank lines are skipped.
absl::StatusOr<std::vector<CsvRow>> ParseCsv(std::string_view text);

absl::StatusOr<std::string> ReadTextFile(const std::string& path);
absl::Status WriteTextFile(const std::string& path, std::string_view contents);

absl::StatusOr<std::vector<CsvRow>> ReadCsvFile(const std::string& path);

std::string EscapeCsvField(std::string_view field);

// Joins fields with commas and terminates with '\n'.
std::string FormatCsvRow(std::span<const std::string> fields);

}  // namespace fpriv

#endif  // FPRIV_CSV_H_
