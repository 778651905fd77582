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

#include "fpriv/publish.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <set>

#include "absl/strings/str_cat.h"
#include "fpriv/csv.h"
#include "fpriv/random.h"
#include "fpriv/status_macros.h"
#include "nlohmann/json.hpp"

namespace fpriv {

int64_t PublishedTables::record_count() const {
  int64_t n = 0;
  for (const PublishedBucket& b : buckets) n += b.size();
  return n;
}

int64_t PublishedTables::st_row_count() const {
  int64_t n = 0;
  for (const PublishedBucket& b : buckets) {
    n += static_cast<int64_t>(b.st.size());
  }
  return n;
}

PublishedTables Publish(const MicrodataTable& table,
                        const Assignment& assignment, uint64_t seed) {
  PublishedTables pt;
  pt.qi_names = table.qi_names();
  pt.sa_name = table.sa_name();
  pt.qi_dicts = table.qi_dicts();
  pt.sa_dict = table.sa_dict();
  pt.buckets.reserve(assignment.buckets.size());
  for (size_t g = 0; g < assignment.buckets.size(); ++g) {
    PublishedBucket out;
    for (RecordId r : assignment.buckets[g].records) {
      out.qit.push_back(table.record(r).qi);
      out.st.push_back(table.record(r).sa);
    }
    Rng rng(MixSeed(seed, g));
    rng.Shuffle(std::span<SaId>(out.st));
    pt.buckets.push_back(std::move(out));
  }
  return pt;
}

NegAssociationModel LearnNegativeAssociations(const PublishedTables& pt,
                                              double threshold) {
  const int32_t m = pt.sa_dict.size();
  const int32_t d = static_cast<int32_t>(pt.qi_names.size());
  const double st_rows = static_cast<double>(pt.st_row_count());

  std::vector<double> sa_total(m, 0);
  for (const PublishedBucket& b : pt.buckets) {
    for (SaId x : b.st) sa_total[x] += 1;
  }

  std::map<NegAssociationModel::Key, double> flagged;
  if (st_rows == 0) return NegAssociationModel(std::move(flagged));
  for (int32_t a = 0; a < d; ++a) {
    const int32_t domain = pt.qi_dicts[a].size();
    std::vector<double> qi_total(domain, 0);
    // observed[z * m + x]
    std::vector<double> observed(static_cast<size_t>(domain) * m, 0);
    for (const PublishedBucket& b : pt.buckets) {
      if (b.st.empty()) continue;
      std::map<ValueId, int64_t> zc;
      std::map<SaId, int64_t> xc;
      for (const auto& row : b.qit) ++zc[row[a]];
      for (SaId x : b.st) ++xc[x];
      const double size = static_cast<double>(b.st.size());
      for (const auto& [z, cz] : zc) {
        qi_total[z] += static_cast<double>(cz);
        for (const auto& [x, cx] : xc) {
          observed[static_cast<size_t>(z) * m + x] +=
              static_cast<double>(cz) * static_cast<double>(cx) / size;
        }
      }
    }
    for (ValueId z = 0; z < domain; ++z) {
      if (qi_total[z] == 0) continue;
      for (SaId x = 0; x < m; ++x) {
        if (sa_total[x] == 0) continue;
        const double expected = qi_total[z] * sa_total[x] / st_rows;
        const double obs = observed[static_cast<size_t>(z) * m + x];
        if (obs < threshold * expected) {
          flagged[{a, z, x}] = obs / expected;
        }
      }
    }
  }
  return NegAssociationModel(std::move(flagged));
}

absl::StatusOr<PublishedTables> InjectFakes(const PublishedTables& pt,
                                            int64_t sigma, uint64_t seed,
                                            const NegAssociationModel* model) {
  if (sigma < 0) return absl::InvalidArgumentError("sigma must be >= 0");
  PublishedTables out = pt;
  out.sigma = pt.sigma + sigma;
  if (sigma == 0) return out;
  const int32_t m = pt.sa_dict.size();
  for (size_t g = 0; g < out.buckets.size(); ++g) {
    PublishedBucket& b = out.buckets[g];
    std::vector<char> present(m, 0);
    for (SaId x : b.st) {
      if (present[x]) {
        return absl::FailedPreconditionError(absl::StrCat(
            "bucket ", g + 1, " holds SA value '", pt.sa_dict.Lookup(x),
            "' more than once; fake injection needs distinct values"));
      }
      present[x] = 1;
    }
    std::vector<SaId> eligible;
    for (SaId x = 0; x < m; ++x) {
      if (present[x]) continue;
      bool removable = false;
      if (model != nullptr) {
        for (const auto& row : b.qit) {
          for (int32_t a = 0; a < static_cast<int32_t>(row.size()); ++a) {
            if (model->IsNegative(a, row[a], x)) removable = true;
          }
        }
      }
      if (!removable) eligible.push_back(x);
    }
    if (static_cast<int64_t>(eligible.size()) < sigma) {
      return absl::FailedPreconditionError(absl::StrCat(
          "bucket ", g + 1, " has only ", eligible.size(),
          " eligible fake values, needs ", sigma));
    }
    Rng rng(MixSeed(seed, g));
    // Partial Fisher-Yates: the first sigma slots become the sample.
    for (int64_t i = 0; i < sigma; ++i) {
      const size_t j =
          static_cast<size_t>(i) + rng.Below(eligible.size() - i);
      std::swap(eligible[i], eligible[j]);
    }
    for (int64_t i = 0; i < sigma; ++i) {
      b.st.push_back(eligible[i]);
      b.fakes.push_back(eligible[i]);
    }
    std::sort(b.fakes.begin(), b.fakes.end());
    rng.Shuffle(std::span<SaId>(b.st));
  }
  return out;
}

absl::StatusOr<CorruptionReport> CorruptionAttackSim(
    const PublishedTables& pt, std::span<const CorruptedRecord> corrupted) {
  const int64_t buckets = static_cast<int64_t>(pt.buckets.size());
  std::vector<std::vector<SaId>> known(buckets);
  for (const CorruptedRecord& c : corrupted) {
    if (c.bucket < 0 || c.bucket >= buckets) {
      return absl::InvalidArgumentError(
          absl::StrCat("corrupted record names bucket ", c.bucket + 1,
                       " of ", buckets));
    }
    known[c.bucket].push_back(c.sa);
  }
  CorruptionReport report;
  for (int64_t g = 0; g < buckets; ++g) {
    const PublishedBucket& b = pt.buckets[g];
    std::map<SaId, int64_t> left;
    for (SaId x : b.st) ++left[x];
    for (SaId x : known[g]) {
      auto it = left.find(x);
      if (it == left.end() || it->second == 0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "corrupted value '", pt.sa_dict.Lookup(x),
            "' is not in bucket ", g + 1));
      }
      --it->second;
    }
    BucketInference inf;
    inf.bucket = g;
    inf.corrupted = static_cast<int64_t>(known[g].size());
    inf.remaining = static_cast<int64_t>(b.st.size()) - inf.corrupted;
    const int64_t sigma = static_cast<int64_t>(b.st.size()) - b.size();
    if (inf.remaining > 0) {
      const double rem = static_cast<double>(inf.remaining);
      inf.real_certainty = static_cast<double>(b.size() - inf.corrupted) / rem;
      inf.fake_fraction = static_cast<double>(sigma) / rem;
      for (const auto& [x, c] : left) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / rem;
        inf.probability[x] = p;
        inf.max_probability = std::max(inf.max_probability, p);
      }
    } else {
      inf.real_certainty = 0;
    }
    report.max_probability =
        std::max(report.max_probability, inf.max_probability);
    report.buckets.push_back(std::move(inf));
  }
  return report;
}

PrivacyRecheck RecheckPrivacy(const PublishedTables& pt,
                              const PrivacySpec& spec) {
  const int32_t m = pt.sa_dict.size();
  PrivacyRecheck out;
  out.max_ratio.assign(m, 0.0);
  for (size_t g = 0; g < pt.buckets.size(); ++g) {
    const PublishedBucket& b = pt.buckets[g];
    const int64_t size = static_cast<int64_t>(b.st.size());
    if (size == 0) continue;
    std::map<SaId, int64_t> counts;
    for (SaId x : b.st) ++counts[x];
    for (const auto& [x, c] : counts) {
      out.max_ratio[x] =
          std::max(out.max_ratio[x], static_cast<double>(c) / size);
      const bool known = x < spec.domain_size();
      if (!known || c > MaxPerBucket(spec.threshold(x), size)) {
        out.violations.push_back({static_cast<int64_t>(g), x, c, size});
      }
    }
  }
  return out;
}

PrivacyRecheck RecheckRealRecords(const PublishedTables& pt,
                                  const PrivacySpec& spec) {
  PublishedTables real = pt;
  for (PublishedBucket& b : real.buckets) {
    std::multiset<SaId> fakes(b.fakes.begin(), b.fakes.end());
    std::vector<SaId> kept;
    kept.reserve(b.st.size());
    for (SaId x : b.st) {
      auto it = fakes.find(x);
      if (it != fakes.end()) {
        fakes.erase(it);
      } else {
        kept.push_back(x);
      }
    }
    b.st = std::move(kept);
    b.fakes.clear();
  }
  return RecheckPrivacy(real, spec);
}

namespace {

std::string JoinPath(const std::string& dir, const char* file) {
  return (std::filesystem::path(dir) / file).string();
}

absl::StatusOr<int64_t> ParseBid(const std::string& field, size_t line) {
  int64_t bid = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), bid);
  if (ec != std::errc() || ptr != field.data() + field.size() || bid < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line, ": bad bucket id '", field, "'"));
  }
  return bid - 1;
}

absl::StatusOr<ValueId> InternValue(Dictionary& dict, bool fixed,
                                    const std::string& value,
                                    const std::string& column) {
  if (!fixed) return dict.Intern(value);
  const std::optional<ValueId> id = dict.Find(value);
  if (!id.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown value '", value, "' in column ", column));
  }
  return *id;
}

}  // namespace

absl::Status WritePublished(const PublishedTables& pt,
                            const std::string& dir) {
  std::string qit;
  std::vector<std::string> header = pt.qi_names;
  header.push_back("BID");
  qit += FormatCsvRow(header);
  std::string st = FormatCsvRow(std::vector<std::string>{"BID", pt.sa_name});
  nlohmann::ordered_json audit;
  audit["sigma"] = pt.sigma;
  audit["buckets"] = nlohmann::ordered_json::array();
  std::vector<std::string> fields(pt.qi_names.size() + 1);
  for (size_t g = 0; g < pt.buckets.size(); ++g) {
    const PublishedBucket& b = pt.buckets[g];
    const std::string bid = absl::StrCat(g + 1);
    for (const auto& row : b.qit) {
      for (size_t a = 0; a < row.size(); ++a) {
        fields[a] = pt.qi_dicts[a].Lookup(row[a]);
      }
      fields.back() = bid;
      qit += FormatCsvRow(fields);
    }
    for (SaId x : b.st) {
      st += FormatCsvRow(std::vector<std::string>{bid, pt.sa_dict.Lookup(x)});
    }
    if (!b.fakes.empty()) {
      nlohmann::ordered_json entry;
      entry["bid"] = g + 1;
      entry["fakes"] = nlohmann::ordered_json::array();
      for (SaId x : b.fakes) entry["fakes"].push_back(pt.sa_dict.Lookup(x));
      audit["buckets"].push_back(std::move(entry));
    }
  }
  FPRIV_RETURN_IF_ERROR(WriteTextFile(JoinPath(dir, kQitFile), qit));
  FPRIV_RETURN_IF_ERROR(WriteTextFile(JoinPath(dir, kStFile), st));
  return WriteTextFile(JoinPath(dir, kFakesAuditFile), audit.dump(2) + "\n");
}

absl::StatusOr<PublishedTables> ReadPublished(const std::string& dir,
                                              const MicrodataTable* schema) {
  FPRIV_ASSIGN_OR_RETURN(std::vector<CsvRow> qit,
                         ReadCsvFile(JoinPath(dir, kQitFile)));
  FPRIV_ASSIGN_OR_RETURN(std::vector<CsvRow> st,
                         ReadCsvFile(JoinPath(dir, kStFile)));
  if (qit.empty() || qit[0].size() < 1 || qit[0].back() != "BID") {
    return absl::InvalidArgumentError("qit.csv must end with a BID column");
  }
  if (st.empty() || st[0].size() != 2 || st[0][0] != "BID") {
    return absl::InvalidArgumentError("st.csv must have columns BID,SA");
  }
  PublishedTables pt;
  pt.qi_names.assign(qit[0].begin(), qit[0].end() - 1);
  pt.sa_name = st[0][1];
  const bool fixed = schema != nullptr;
  if (fixed) {
    if (schema->qi_names() != pt.qi_names) {
      return absl::InvalidArgumentError(
          "qit.csv columns do not match the source table");
    }
    pt.qi_dicts = schema->qi_dicts();
    pt.sa_dict = schema->sa_dict();
  } else {
    pt.qi_dicts.resize(pt.qi_names.size());
  }
  auto bucket = [&pt](int64_t bid) -> PublishedBucket& {
    if (bid >= static_cast<int64_t>(pt.buckets.size())) {
      pt.buckets.resize(bid + 1);
    }
    return pt.buckets[bid];
  };
  const size_t d = pt.qi_names.size();
  for (size_t line = 1; line < qit.size(); ++line) {
    const CsvRow& row = qit[line];
    if (row.size() != d + 1) {
      return absl::InvalidArgumentError(absl::StrCat(
          "qit.csv line ", line + 1, " has ", row.size(), " fields"));
    }
    FPRIV_ASSIGN_OR_RETURN(int64_t bid, ParseBid(row.back(), line + 1));
    std::vector<ValueId> qi(d);
    for (size_t a = 0; a < d; ++a) {
      FPRIV_ASSIGN_OR_RETURN(
          qi[a], InternValue(pt.qi_dicts[a], fixed, row[a], pt.qi_names[a]));
    }
    bucket(bid).qit.push_back(std::move(qi));
  }
  for (size_t line = 1; line < st.size(); ++line) {
    const CsvRow& row = st[line];
    if (row.size() != 2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "st.csv line ", line + 1, " has ", row.size(), " fields"));
    }
    FPRIV_ASSIGN_OR_RETURN(int64_t bid, ParseBid(row[0], line + 1));
    FPRIV_ASSIGN_OR_RETURN(SaId x,
                           InternValue(pt.sa_dict, fixed, row[1], pt.sa_name));
    bucket(bid).st.push_back(x);
  }
  for (size_t g = 0; g < pt.buckets.size(); ++g) {
    const PublishedBucket& b = pt.buckets[g];
    if (b.qit.empty() || b.st.size() < b.qit.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "bucket ", g + 1, " has ", b.qit.size(), " QIT rows and ",
          b.st.size(), " ST rows"));
    }
  }

  const std::string audit_path = JoinPath(dir, kFakesAuditFile);
  if (std::filesystem::exists(audit_path)) {
    FPRIV_ASSIGN_OR_RETURN(std::string text, ReadTextFile(audit_path));
    const nlohmann::json audit = nlohmann::json::parse(text, nullptr, false);
    if (audit.is_discarded() || !audit.is_object()) {
      return absl::DataLossError("fakes_audit.json is not valid JSON");
    }
    if (audit.contains("sigma") && audit["sigma"].is_number_integer()) {
      pt.sigma = audit["sigma"].get<int64_t>();
    }
    for (const auto& entry : audit.value("buckets", nlohmann::json::array())) {
      if (!entry.is_object() || !entry.contains("bid") ||
          !entry["bid"].is_number_integer()) {
        return absl::DataLossError("fakes_audit.json has a malformed bucket");
      }
      const int64_t bid = entry["bid"].get<int64_t>() - 1;
      if (bid < 0 || bid >= static_cast<int64_t>(pt.buckets.size())) {
        return absl::DataLossError("fakes_audit.json names an unknown bucket");
      }
      for (const auto& v : entry.value("fakes", nlohmann::json::array())) {
        const std::optional<SaId> x =
            v.is_string() ? pt.sa_dict.Find(v.get<std::string>())
                          : std::nullopt;
        if (!x.has_value()) {
          return absl::DataLossError("fakes_audit.json names an unknown value");
        }
        pt.buckets[bid].fakes.push_back(*x);
      }
      std::sort(pt.buckets[bid].fakes.begin(), pt.buckets[bid].fakes.end());
    }
  } else {
    int64_t sigma = 0;
    for (const PublishedBucket& b : pt.buckets) {
      sigma = std::max(sigma, static_cast<int64_t>(b.st.size()) - b.size());
    }
    pt.sigma = sigma;
  }
  return pt;
}

}  // namespace fpriv
