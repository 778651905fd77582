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

// Searches for minimum-loss valid bucket settings.

#ifndef FPRIV_OPTIMIZE_H_
#define FPRIV_OPTIMIZE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/gamma.h"
#include "fpriv/privacy.h"
#include "fpriv/table.h"
#include "fpriv/validate.h"

namespace fpriv {

// Bucket sizes considered: [min_size, max_size].
struct SearchConfig {
  int64_t min_size = 1;
  int64_t max_size = 50;

  // min_size defaults to DefaultMinSize(spec). An explicit min_size may only
  // lower it, down to 1. max_size must exceed min_size.
  static absl::StatusOr<SearchConfig> ForSpec(const PrivacySpec& spec,
                                              std::optional<int64_t> min_size,
                                              int64_t max_size);
};

enum class Pruning {
  kFull,      // loss prefix + binary-searched valid region
  kLossOnly,  // loss prefix, then a sequential scan for the first valid pair
  kNone,      // validate every pair of every list
};

struct SizePairTrace {
  int64_t s1 = 0;
  int64_t s2 = 0;
  int64_t list_length = 0;  // 0 when no feasible pair exists
  int64_t prefix = 0;       // positions left after loss pruning
  int64_t evaluations = 0;
  std::optional<BucketPair> best;
  int64_t best_loss = kUnboundedLoss;  // loss bound after this size pair
};

struct SearchStats {
  int64_t size_pairs = 0;
  int64_t empty_lists = 0;
  int64_t evaluations = 0;
  int64_t two_interval_cases = 0;
};

struct SearchResult {
  BucketSetting setting;
  int64_t loss = 0;
  SearchStats stats;
  std::vector<SizePairTrace> trace;
};

struct TwoSizeOptions {
  Pruning pruning = Pruning::kFull;
  bool record_trace = false;
};

// Optimal <(S1, b1), (S2, b2)> with min_size <= S1 < S2 <= max_size and
// b1, b2 >= 0. Size pairs are visited with S1 ascending, then S2 ascending;
// a later pair replaces the incumbent only on strictly lower loss. The
// returned setting keeps both groups even when one count is zero; `stats`
// is filled in either case when `stats_out` is given.
std::optional<SearchResult> TwoSizeBucketing(std::span<const int64_t> counts,
                                             const PrivacySpec& spec,
                                             const SearchConfig& config,
                                             const TwoSizeOptions& options = {},
                                             SearchStats* stats_out = nullptr);

// Best valid single-size setting in the configured size range.
std::optional<SearchResult> OneSizeBucketing(std::span<const int64_t> counts,
                                             const PrivacySpec& spec,
                                             const SearchConfig& config);

inline constexpr int64_t kBruteForceBudget = 10'000'000;

// Exhaustive minimum over all settings with at most `max_sizes` distinct
// sizes in the configured range, each decided by FlowFeasible(). Returns
// ResourceExhausted once more than `budget` candidate settings are seen.
absl::StatusOr<std::optional<SearchResult>> BruteForceOptimal(
    std::span<const int64_t> counts, const PrivacySpec& spec,
    const SearchConfig& config, int max_sizes,
    int64_t budget = kBruteForceBudget);

// Loss of covering n records with buckets of size ell and ell + 1, using as
// many size-ell buckets as possible. Privacy is ignored.
absl::StatusOr<BucketSetting> AnatomyBaselineSetting(int64_t n, int64_t ell);
absl::StatusOr<int64_t> AnatomyBaselineLoss(int64_t n, int64_t ell);

struct Leaf {
  std::vector<RecordId> records;
  BucketGroup group;
};

struct MultiSizeResult {
  std::vector<Leaf> leaves;  // depth-first, first-group-first order
  BucketSetting setting;     // leaves merged by size
  int64_t loss = 0;
  // (loss before, loss after) for every accepted refinement.
  std::vector<std::pair<int64_t, int64_t>> refinements;
};

// Recursively replaces a group by its optimal two-size refinement while that
// strictly lowers the loss, splitting the records with PartitionRecords().
// `subset` must fill `current` exactly.
absl::StatusOr<MultiSizeResult> MultiSizeBucketing(
    const MicrodataTable& table, std::span<const RecordId> subset,
    const BucketGroup& current, const PrivacySpec& spec,
    const SearchConfig& config);

// Starts from a single bucket holding the whole table.
absl::StatusOr<MultiSizeResult> MultiSizeBucketing(const MicrodataTable& table,
                                                   const PrivacySpec& spec,
                                                   const SearchConfig& config);

// Round-robin assignment inside each leaf; buckets ordered by size, then by
// leaf order.
absl::StatusOr<Assignment> AssignLeaves(const MicrodataTable& table,
                                        std::span<const Leaf> leaves);

}  // namespace fpriv

#endif  // FPRIV_OPTIMIZE_H_
