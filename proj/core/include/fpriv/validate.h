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

// Bucket settings and the tests that decide whether records can be assigned
// to them without any bucket exceeding a value's threshold.
//
// A setting <(S_1, b_1), ..., (S_q, b_q)> has b_j buckets of size S_j. For one
// size the round-robin assignment is optimal, so a one-size setting is valid
// iff o_i <= floor(f'_i S) b for every value. For two sizes the setting is
// valid iff the privacy, fill and capacity constraints hold:
//
//   PC: a_i1 + a_i2 >= o_i          for every value i
//   FC: sum_i a_ij >= b_j S_j       for j = 1, 2
//   CC: b_1 S_1 + b_2 S_2 == |T|
//
// where a_ij = min{floor(f'_i S_j) b_j, o_i}. These conditions do not
// characterize validity for three or more sizes; use FlowFeasible() there.

#ifndef FPRIV_VALIDATE_H_
#define FPRIV_VALIDATE_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/privacy.h"
#include "fpriv/table.h"

namespace fpriv {

struct BucketGroup {
  int64_t size = 1;
  int64_t count = 0;

  int64_t capacity() const { return size * count; }
  // Sum over the group's buckets of (|g| - 1)^2.
  int64_t loss() const { return count * (size - 1) * (size - 1); }

  friend bool operator==(const BucketGroup&, const BucketGroup&) = default;
};

class BucketSetting {
 public:
  BucketSetting() = default;

  // Sizes must be >= 1 and strictly increasing; counts must be >= 0.
  static absl::StatusOr<BucketSetting> Create(std::vector<BucketGroup> groups);

  // Merges groups of equal size and sorts; drops empty groups.
  static BucketSetting FromGroups(std::span<const BucketGroup> groups);

  const std::vector<BucketGroup>& groups() const { return groups_; }
  int64_t capacity() const;
  int64_t loss() const;
  int64_t bucket_count() const;

  // Same setting without count-0 groups.
  BucketSetting WithoutEmptyGroups() const;

  std::string DebugString() const;

  friend bool operator==(const BucketSetting&, const BucketSetting&) = default;

 private:
  explicit BucketSetting(std::vector<BucketGroup> g) : groups_(std::move(g)) {}
  std::vector<BucketGroup> groups_;
};

struct Bucket {
  int64_t size = 0;
  std::vector<RecordId> records;
};

// Buckets of an assignment, ordered group-major (all buckets of the first
// group, then the next, ...).
struct Assignment {
  std::vector<Bucket> buckets;

  // bucket index per table record id; -1 when the record is unassigned.
  std::vector<int64_t> BucketOf(int64_t table_size) const;
  void Append(Assignment other);
};

// Round-robin assignment of records to `count` buckets of `size`: the t-th
// record (0-based) of value i goes to bucket (o_1 + ... + o_{i-1} + t) mod
// count. Each bucket receives floor(o_i/count) or ceil(o_i/count) records of
// value i. Fails unless the record total equals size * count.
absl::StatusOr<Assignment> RoundRobinAssign(
    std::span<const std::vector<RecordId>> records_by_value, int64_t size,
    int64_t count);

// o_i <= floor(f'_i S) b for every i, and sum_i o_i == S b.
bool ValidateOneSize(std::span<const int64_t> counts, const PrivacySpec& spec,
                     int64_t size, int64_t count);

// u[j][i] = floor(f'_i S_j) b_j and a[j][i] = min(u[j][i], o_i).
struct AllocationBounds {
  std::vector<std::vector<int64_t>> upper;
  std::vector<std::vector<int64_t>> allowed;
};

AllocationBounds ComputeAllocationBounds(std::span<const int64_t> counts,
                                         const PrivacySpec& spec,
                                         const BucketSetting& setting);

struct ConstraintReport {
  bool privacy_ok = true;
  bool fill_ok = true;
  bool capacity_ok = true;
  std::vector<SaId> privacy_failures;  // values violating PC
  std::vector<int> fill_failures;      // group indices violating FC

  bool ok() const { return privacy_ok && fill_ok && capacity_ok; }
  std::string Diagnostics() const;
};

// PC/FC/CC evaluated on any number of groups. Exact for q <= 2; for q >= 3
// it is necessary but not sufficient.
ConstraintReport CheckConstraints(std::span<const int64_t> counts,
                                  const PrivacySpec& spec,
                                  const BucketSetting& setting);

// Exact validity test for settings with at most two groups. A count-0 group
// is allowed and reduces the test to ValidateOneSize().
absl::StatusOr<ConstraintReport> ValidateTwoSize(
    std::span<const int64_t> counts, const PrivacySpec& spec,
    const BucketSetting& setting);

// Allocation-free PC/FC/CC test on a raw (S1, b1, S2, b2) pair.
bool PairIsValid(std::span<const int64_t> counts, const PrivacySpec& spec,
                 int64_t s1, int64_t b1, int64_t s2, int64_t b2);

struct RecordPartition {
  std::vector<RecordId> first;   // records for the first group
  std::vector<RecordId> second;  // records for the second group
  int64_t moves = 0;             // records moved from `first` to `second`
};

// Splits `subset` between the two groups of a valid setting. Each value
// starts with its first a_i1 records in `first`; then, while `first` is over
// capacity, the sweep visits values in ascending id order and moves one record
// of each value whose `second` count is below a_i2. Moved records are taken
// from the end of the value's run in `first`, so both parts keep input order
// within a value.
absl::StatusOr<RecordPartition> PartitionRecords(
    const MicrodataTable& table, std::span<const RecordId> subset,
    const PrivacySpec& spec, const BucketSetting& setting);

// Assigns `subset` to a valid setting of at most two groups: partition, then
// round-robin within each group. Bucket ids are group-major.
absl::StatusOr<Assignment> AssignTwoSize(const MicrodataTable& table,
                                         std::span<const RecordId> subset,
                                         const PrivacySpec& spec,
                                         const BucketSetting& setting);

// Checks that every bucket is full and that |g, x_i| / |g| <= f'_i.
absl::Status VerifyAssignment(const MicrodataTable& table,
                              const PrivacySpec& spec,
                              const Assignment& assignment);

}  // namespace fpriv

#endif  // FPRIV_VALIDATE_H_
