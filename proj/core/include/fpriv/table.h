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

// Microdata tables with categorical quasi-identifier (QI) columns and a single
// sensitive attribute (SA) column. All values are interned to dense integer
// ids at construction; the SA id space [0, m) is the SA domain.

#ifndef FPRIV_TABLE_H_
#define FPRIV_TABLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/csv.h"

namespace fpriv {

using ValueId = int32_t;
using SaId = int32_t;
using RecordId = int64_t;

// Bidirectional string <-> dense id map. Ids follow first-insertion order.
class Dictionary {
 public:
  ValueId Intern(std::string_view value);
  std::optional<ValueId> Find(std::string_view value) const;
  const std::string& Lookup(ValueId id) const { return values_[id]; }
  int32_t size() const { return static_cast<int32_t>(values_.size()); }
  std::span<const std::string> values() const { return values_; }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, ValueId> index_;
};

struct Record {
  std::vector<ValueId> qi;
  SaId sa = 0;
};

class MicrodataTable {
 public:
  // Checks that every record has one value per QI attribute, that every id is
  // inside its dictionary, and that the table is non-empty.
  static absl::StatusOr<MicrodataTable> Create(
      std::vector<std::string> qi_names, std::string sa_name,
      std::vector<Dictionary> qi_dicts, Dictionary sa_dict,
      std::vector<Record> records);

  // Builds a table from string rows; every column but `sa_column` is a QI.
  static absl::StatusOr<MicrodataTable> FromRows(
      const CsvRow& header, std::span<const CsvRow> rows,
      std::string_view sa_column);

  int64_t size() const { return static_cast<int64_t>(records_.size()); }
  int32_t sa_domain_size() const { return sa_dict_.size(); }
  int32_t qi_count() const { return static_cast<int32_t>(qi_names_.size()); }

  const std::vector<std::string>& qi_names() const { return qi_names_; }
  const std::string& sa_name() const { return sa_name_; }
  const std::vector<Dictionary>& qi_dicts() const { return qi_dicts_; }
  const Dictionary& sa_dict() const { return sa_dict_; }
  const std::vector<Record>& records() const { return records_; }
  const Record& record(RecordId id) const { return records_[id]; }

  std::vector<int32_t> qi_domain_sizes() const;

 private:
  MicrodataTable() = default;

  std::vector<std::string> qi_names_;
  std::string sa_name_;
  std::vector<Dictionary> qi_dicts_;
  Dictionary sa_dict_;
  std::vector<Record> records_;
};

// Reads a header-bearing CSV and interns it. Errors on a missing file, an
// empty file, a missing `sa_column`, or a row whose width differs from the
// header.
absl::StatusOr<MicrodataTable> IngestCsv(const std::string& path,
                                         std::string_view sa_column);

// Writes `table` back to CSV with the original column order (QI columns
// followed by the SA column).
std::string TableToCsv(const MicrodataTable& table);

// Occurrence counts o_i over the SA domain. Frequencies are o_i / n and are
// only materialized as doubles on request.
class SaHistogram {
 public:
  SaHistogram() = default;
  explicit SaHistogram(std::vector<int64_t> counts);

  int32_t domain_size() const { return static_cast<int32_t>(counts_.size()); }
  int64_t total() const { return total_; }
  int64_t count(SaId i) const { return counts_[i]; }
  double freq(SaId i) const {
    return static_cast<double>(counts_[i]) / static_cast<double>(total_);
  }
  std::span<const int64_t> counts() const { return counts_; }

 private:
  std::vector<int64_t> counts_;
  int64_t total_ = 0;
};

SaHistogram Histogram(const MicrodataTable& table);

// Histogram of a subset of the table's records, over the full SA domain.
SaHistogram Histogram(const MicrodataTable& table,
                      std::span<const RecordId> subset);

// Record ids of `subset` grouped by SA value, each group in subset order.
std::vector<std::vector<RecordId>> GroupBySa(const MicrodataTable& table,
                                             std::span<const RecordId> subset);

// 0, 1, ..., table.size() - 1.
std::vector<RecordId> AllRecords(const MicrodataTable& table);

}  // namespace fpriv

#endif  // FPRIV_TABLE_H_
