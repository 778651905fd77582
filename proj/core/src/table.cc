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

#include "fpriv/table.h"

#include <numeric>

#include "absl/strings/str_cat.h"
#include "fpriv/status_macros.h"

namespace fpriv {

ValueId Dictionary::Intern(std::string_view value) {
  auto it = index_.find(std::string(value));
  if (it != index_.end()) return it->second;
  const ValueId id = static_cast<ValueId>(values_.size());
  values_.emplace_back(value);
  index_.emplace(values_.back(), id);
  return id;
}

std::optional<ValueId> Dictionary::Find(std::string_view value) const {
  auto it = index_.find(std::string(value));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<MicrodataTable> MicrodataTable::Create(
    std::vector<std::string> qi_names, std::string sa_name,
    std::vector<Dictionary> qi_dicts, Dictionary sa_dict,
    std::vector<Record> records) {
  if (records.empty()) {
    return absl::InvalidArgumentError("table has no records");
  }
  if (qi_dicts.size() != qi_names.size()) {
    return absl::InvalidArgumentError(
        "one dictionary is required per QI attribute");
  }
  for (size_t r = 0; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (rec.qi.size() != qi_names.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", r, " has ", rec.qi.size(),
                       " QI values, expected ", qi_names.size()));
    }
    if (rec.sa < 0 || rec.sa >= sa_dict.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", r, " has an SA id outside the domain"));
    }
    for (size_t a = 0; a < rec.qi.size(); ++a) {
      if (rec.qi[a] < 0 || rec.qi[a] >= qi_dicts[a].size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "record ", r, " has an id outside the domain of ", qi_names[a]));
      }
    }
  }
  MicrodataTable t;
  t.qi_names_ = std::move(qi_names);
  t.sa_name_ = std::move(sa_name);
  t.qi_dicts_ = std::move(qi_dicts);
  t.sa_dict_ = std::move(sa_dict);
  t.records_ = std::move(records);
  return t;
}

absl::StatusOr<MicrodataTable> MicrodataTable::FromRows(
    const CsvRow& header, std::span<const CsvRow> rows,
    std::string_view sa_column) {
  int sa_index = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == sa_column) {
      if (sa_index >= 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("column '", std::string(sa_column), "' appears twice"));
      }
      sa_index = static_cast<int>(c);
    }
  }
  if (sa_index < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitive column '", std::string(sa_column), "' not in header"));
  }
  if (rows.empty()) {
    return absl::InvalidArgumentError("no data rows after the header");
  }

  std::vector<std::string> qi_names;
  for (size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) != sa_index) qi_names.push_back(header[c]);
  }
  std::vector<Dictionary> qi_dicts(qi_names.size());
  Dictionary sa_dict;
  std::vector<Record> records;
  records.reserve(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.size() != header.size()) {
      // Row numbers are 1-based and count the header.
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r + 2, " has ", row.size(), " fields, header has ",
                       header.size()));
    }
    Record rec;
    rec.qi.reserve(qi_names.size());
    size_t a = 0;
    for (size_t c = 0; c < row.size(); ++c) {
      if (static_cast<int>(c) == sa_index) {
        rec.sa = sa_dict.Intern(row[c]);
      } else {
        rec.qi.push_back(qi_dicts[a++].Intern(row[c]));
      }
    }
    records.push_back(std::move(rec));
  }
  return Create(std::move(qi_names), std::string(sa_column),
                std::move(qi_dicts), std::move(sa_dict), std::move(records));
}

std::vector<int32_t> MicrodataTable::qi_domain_sizes() const {
  std::vector<int32_t> sizes;
  sizes.reserve(qi_dicts_.size());
  for (const Dictionary& d : qi_dicts_) sizes.push_back(d.size());
  return sizes;
}

absl::StatusOr<MicrodataTable> IngestCsv(const std::string& path,
                                         std::string_view sa_column) {
  FPRIV_ASSIGN_OR_RETURN(std::vector<CsvRow> rows, ReadCsvFile(path));
  if (rows.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": empty file"));
  }
  auto table = MicrodataTable::FromRows(
      rows.front(), std::span<const CsvRow>(rows).subspan(1), sa_column);
  if (!table.ok()) {
    return absl::Status(table.status().code(),
                        absl::StrCat(path, ": ", table.status().message()));
  }
  return table;
}

std::string TableToCsv(const MicrodataTable& table) {
  std::vector<std::string> fields = table.qi_names();
  fields.push_back(table.sa_name());
  std::string out = FormatCsvRow(fields);
  for (const Record& rec : table.records()) {
    for (size_t a = 0; a < rec.qi.size(); ++a) {
      fields[a] = table.qi_dicts()[a].Lookup(rec.qi[a]);
    }
    fields.back() = table.sa_dict().Lookup(rec.sa);
    out += FormatCsvRow(fields);
  }
  return out;
}

SaHistogram::SaHistogram(std::vector<int64_t> counts)
    : counts_(std::move(counts)),
      total_(std::accumulate(counts_.begin(), counts_.end(), int64_t{0})) {}

SaHistogram Histogram(const MicrodataTable& table) {
  std::vector<int64_t> counts(table.sa_domain_size(), 0);
  for (const Record& rec : table.records()) ++counts[rec.sa];
  return SaHistogram(std::move(counts));
}

SaHistogram Histogram(const MicrodataTable& table,
                      std::span<const RecordId> subset) {
  std::vector<int64_t> counts(table.sa_domain_size(), 0);
  for (RecordId id : subset) ++counts[table.record(id).sa];
  return SaHistogram(std::move(counts));
}

std::vector<std::vector<RecordId>> GroupBySa(const MicrodataTable& table,
                                             std::span<const RecordId> subset) {
  std::vector<std::vector<RecordId>> groups(table.sa_domain_size());
  for (RecordId id : subset) groups[table.record(id).sa].push_back(id);
  return groups;
}

std::vector<RecordId> AllRecords(const MicrodataTable& table) {
  std::vector<RecordId> ids(table.size());
  std::iota(ids.begin(), ids.end(), RecordId{0});
  return ids;
}

}  // namespace fpriv
