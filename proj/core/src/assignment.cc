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

#include <algorithm>
#include <map>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "fpriv/status_macros.h"
#include "fpriv/validate.h"

namespace fpriv {

absl::StatusOr<BucketSetting> BucketSetting::Create(
    std::vector<BucketGroup> groups) {
  for (size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].size < 1) {
      return absl::InvalidArgumentError("bucket size must be >= 1");
    }
    if (groups[j].count < 0) {
      return absl::InvalidArgumentError("bucket count must be >= 0");
    }
    if (j > 0 && groups[j].size <= groups[j - 1].size) {
      return absl::InvalidArgumentError(
          "bucket sizes must be strictly increasing");
    }
  }
  return BucketSetting(std::move(groups));
}

BucketSetting BucketSetting::FromGroups(std::span<const BucketGroup> groups) {
  std::map<int64_t, int64_t> merged;
  for (const BucketGroup& g : groups) {
    if (g.count > 0) merged[g.size] += g.count;
  }
  std::vector<BucketGroup> out;
  for (const auto& [size, count] : merged) out.push_back({size, count});
  return BucketSetting(std::move(out));
}

int64_t BucketSetting::capacity() const {
  int64_t total = 0;
  for (const BucketGroup& g : groups_) total += g.capacity();
  return total;
}

int64_t BucketSetting::loss() const {
  int64_t total = 0;
  for (const BucketGroup& g : groups_) total += g.loss();
  return total;
}

int64_t BucketSetting::bucket_count() const {
  int64_t total = 0;
  for (const BucketGroup& g : groups_) total += g.count;
  return total;
}

BucketSetting BucketSetting::WithoutEmptyGroups() const {
  std::vector<BucketGroup> out;
  for (const BucketGroup& g : groups_) {
    if (g.count > 0) out.push_back(g);
  }
  return BucketSetting(std::move(out));
}

std::string BucketSetting::DebugString() const {
  return absl::StrCat(
      "<",
      absl::StrJoin(groups_, ", ",
                    [](std::string* out, const BucketGroup& g) {
                      absl::StrAppend(out, "(", g.size, ",", g.count, ")");
                    }),
      ">");
}

std::vector<int64_t> Assignment::BucketOf(int64_t table_size) const {
  std::vector<int64_t> of(table_size, -1);
  for (size_t b = 0; b < buckets.size(); ++b) {
    for (RecordId id : buckets[b].records) of[id] = static_cast<int64_t>(b);
  }
  return of;
}

void Assignment::Append(Assignment other) {
  buckets.insert(buckets.end(), std::make_move_iterator(other.buckets.begin()),
                 std::make_move_iterator(other.buckets.end()));
}

absl::StatusOr<Assignment> RoundRobinAssign(
    std::span<const std::vector<RecordId>> records_by_value, int64_t size,
    int64_t count) {
  int64_t total = 0;
  for (const auto& v : records_by_value) total += static_cast<int64_t>(v.size());
  if (size < 1 || count < 0 || total != size * count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "round-robin needs ", size, " x ", count, " records, got ", total));
  }
  Assignment out;
  out.buckets.resize(count);
  for (Bucket& b : out.buckets) {
    b.size = size;
    b.records.reserve(size);
  }
  int64_t position = 0;
  for (const auto& records : records_by_value) {
    for (RecordId id : records) {
      out.buckets[position % count].records.push_back(id);
      ++position;
    }
  }
  return out;
}

bool ValidateOneSize(std::span<const int64_t> counts, const PrivacySpec& spec,
                     int64_t size, int64_t count) {
  int64_t total = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    if (counts[i] > MaxPerBucket(spec.threshold(i), size) * count) return false;
  }
  return total == size * count;
}

AllocationBounds ComputeAllocationBounds(std::span<const int64_t> counts,
                                         const PrivacySpec& spec,
                                         const BucketSetting& setting) {
  AllocationBounds bounds;
  for (const BucketGroup& g : setting.groups()) {
    std::vector<int64_t> upper(counts.size());
    std::vector<int64_t> allowed(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
      upper[i] = MaxPerBucket(spec.threshold(i), g.size) * g.count;
      allowed[i] = std::min(upper[i], counts[i]);
    }
    bounds.upper.push_back(std::move(upper));
    bounds.allowed.push_back(std::move(allowed));
  }
  return bounds;
}

std::string ConstraintReport::Diagnostics() const {
  if (ok()) return "PC, FC and CC hold";
  std::vector<std::string> parts;
  if (!privacy_ok) {
    parts.push_back(
        absl::StrCat("PC fails for values {",
                     absl::StrJoin(privacy_failures, ","), "}"));
  }
  if (!fill_ok) {
    parts.push_back(absl::StrCat("FC fails for groups {",
                                 absl::StrJoin(fill_failures, ","), "}"));
  }
  if (!capacity_ok) parts.push_back("CC fails: capacity differs from |T|");
  return absl::StrJoin(parts, "; ");
}

ConstraintReport CheckConstraints(std::span<const int64_t> counts,
                                  const PrivacySpec& spec,
                                  const BucketSetting& setting) {
  const AllocationBounds bounds =
      ComputeAllocationBounds(counts, spec, setting);
  ConstraintReport report;
  const int64_t total =
      std::accumulate(counts.begin(), counts.end(), int64_t{0});
  report.capacity_ok = setting.capacity() == total;
  for (size_t i = 0; i < counts.size(); ++i) {
    int64_t room = 0;
    for (const auto& allowed : bounds.allowed) room += allowed[i];
    if (room < counts[i]) {
      report.privacy_ok = false;
      report.privacy_failures.push_back(static_cast<SaId>(i));
    }
  }
  const auto& groups = setting.groups();
  for (size_t j = 0; j < groups.size(); ++j) {
    const auto& allowed = bounds.allowed[j];
    const int64_t fill =
        std::accumulate(allowed.begin(), allowed.end(), int64_t{0});
    if (fill < groups[j].capacity()) {
      report.fill_ok = false;
      report.fill_failures.push_back(static_cast<int>(j));
    }
  }
  return report;
}

absl::StatusOr<ConstraintReport> ValidateTwoSize(
    std::span<const int64_t> counts, const PrivacySpec& spec,
    const BucketSetting& setting) {
  if (setting.groups().size() > 2) {
    return absl::InvalidArgumentError(
        "two-size validation needs at most two groups; use FlowFeasible");
  }
  return CheckConstraints(counts, spec, setting);
}

bool PairIsValid(std::span<const int64_t> counts, const PrivacySpec& spec,
                 int64_t s1, int64_t b1, int64_t s2, int64_t b2) {
  int64_t total = 0;
  int64_t fill1 = 0;
  int64_t fill2 = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    const int64_t o = counts[i];
    const double t = spec.threshold(static_cast<SaId>(i));
    const int64_t a1 = std::min(MaxPerBucket(t, s1) * b1, o);
    const int64_t a2 = std::min(MaxPerBucket(t, s2) * b2, o);
    if (a1 + a2 < o) return false;
    fill1 += a1;
    fill2 += a2;
    total += o;
  }
  return fill1 >= s1 * b1 && fill2 >= s2 * b2 && s1 * b1 + s2 * b2 == total;
}

absl::StatusOr<RecordPartition> PartitionRecords(
    const MicrodataTable& table, std::span<const RecordId> subset,
    const PrivacySpec& spec, const BucketSetting& setting) {
  const SaHistogram hist = Histogram(table, subset);
  FPRIV_ASSIGN_OR_RETURN(ConstraintReport report,
                         ValidateTwoSize(hist.counts(), spec, setting));
  if (!report.ok()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "cannot partition for invalid setting ", setting.DebugString(), ": ",
        report.Diagnostics()));
  }
  const auto& groups = setting.groups();
  RecordPartition out;
  if (groups.size() < 2) {
    if (!groups.empty()) out.first.assign(subset.begin(), subset.end());
    return out;
  }

  const AllocationBounds bounds =
      ComputeAllocationBounds(hist.counts(), spec, setting);
  const auto& a1 = bounds.allowed[0];
  const auto& a2 = bounds.allowed[1];
  const int32_t m = hist.domain_size();

  std::vector<int64_t> split(a1.begin(), a1.end());
  std::vector<int64_t> in_second(m);
  int64_t first_size = 0;
  for (SaId i = 0; i < m; ++i) {
    in_second[i] = hist.count(i) - split[i];
    first_size += split[i];
  }
  int64_t excess = first_size - groups[0].capacity();
  while (excess > 0) {
    bool moved = false;
    for (SaId i = 0; i < m && excess > 0; ++i) {
      if (in_second[i] < a2[i] && split[i] > 0) {
        --split[i];
        ++in_second[i];
        --excess;
        ++out.moves;
        moved = true;
      }
    }
    if (!moved) {
      return absl::InternalError("record partition stalled; FC inconsistent");
    }
  }

  const auto by_value = GroupBySa(table, subset);
  out.first.reserve(groups[0].capacity());
  out.second.reserve(groups[1].capacity());
  for (SaId i = 0; i < m; ++i) {
    const auto& recs = by_value[i];
    out.first.insert(out.first.end(), recs.begin(), recs.begin() + split[i]);
    out.second.insert(out.second.end(), recs.begin() + split[i], recs.end());
  }
  return out;
}

absl::StatusOr<Assignment> AssignTwoSize(const MicrodataTable& table,
                                         std::span<const RecordId> subset,
                                         const PrivacySpec& spec,
                                         const BucketSetting& setting) {
  FPRIV_ASSIGN_OR_RETURN(RecordPartition parts,
                         PartitionRecords(table, subset, spec, setting));
  Assignment out;
  const auto& groups = setting.groups();
  const std::vector<RecordId>* sides[2] = {&parts.first, &parts.second};
  for (size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].count == 0) continue;
    const auto by_value = GroupBySa(table, *sides[j]);
    FPRIV_ASSIGN_OR_RETURN(
        Assignment part,
        RoundRobinAssign(by_value, groups[j].size, groups[j].count));
    out.Append(std::move(part));
  }
  return out;
}

absl::Status VerifyAssignment(const MicrodataTable& table,
                              const PrivacySpec& spec,
                              const Assignment& assignment) {
  std::vector<int64_t> counts(table.sa_domain_size());
  std::vector<bool> seen(table.size(), false);
  for (size_t b = 0; b < assignment.buckets.size(); ++b) {
    const Bucket& bucket = assignment.buckets[b];
    if (static_cast<int64_t>(bucket.records.size()) != bucket.size) {
      return absl::FailedPreconditionError(
          absl::StrCat("bucket ", b, " holds ", bucket.records.size(),
                       " records but has size ", bucket.size));
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (RecordId id : bucket.records) {
      if (id < 0 || id >= table.size() || seen[id]) {
        return absl::FailedPreconditionError(
            absl::StrCat("record ", id, " is missing or assigned twice"));
      }
      seen[id] = true;
      ++counts[table.record(id).sa];
    }
    for (SaId i = 0; i < table.sa_domain_size(); ++i) {
      if (counts[i] > MaxPerBucket(spec.threshold(i), bucket.size)) {
        return absl::FailedPreconditionError(absl::StrCat(
            "bucket ", b, ": value '", table.sa_dict().Lookup(i), "' occurs ",
            counts[i], " times in a bucket of ", bucket.size));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace fpriv
