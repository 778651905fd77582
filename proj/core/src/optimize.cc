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

#include "fpriv/optimize.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "fpriv/flow.h"
#include "fpriv/status_macros.h"

namespace fpriv {

absl::StatusOr<SearchConfig> SearchConfig::ForSpec(
    const PrivacySpec& spec, std::optional<int64_t> min_size,
    int64_t max_size) {
  const int64_t floor_size = DefaultMinSize(spec);
  SearchConfig config;
  config.min_size = min_size.value_or(floor_size);
  config.max_size = max_size;
  if (config.min_size < 1) {
    return absl::InvalidArgumentError("minimum bucket size must be >= 1");
  }
  if (config.min_size > floor_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "minimum bucket size may only be lowered below its default of ",
        floor_size));
  }
  if (config.max_size <= config.min_size) {
    return absl::InvalidArgumentError(
        absl::StrCat("maximum bucket size ", config.max_size,
                     " must exceed the minimum ", config.min_size));
  }
  return config;
}

namespace {

struct PairOutcome {
  std::optional<int64_t> position;
  int64_t prefix = 0;
  int64_t evaluations = 0;
};

PairOutcome SearchList(const GammaList& g, std::span<const int64_t> counts,
                       const PrivacySpec& spec, int64_t best_loss,
                       Pruning pruning, SearchStats& stats) {
  PairOutcome out;
  switch (pruning) {
    case Pruning::kFull: {
      RegionStats region_stats;
      const IndexRegion region =
          ValidRegion(g, counts, spec, best_loss, &region_stats);
      out.prefix = LossPrefix(g, best_loss);
      out.position = region.First();
      out.evaluations = region_stats.evaluations;
      stats.two_interval_cases += region_stats.two_interval_cases;
      break;
    }
    case Pruning::kLossOnly: {
      out.prefix = LossPrefix(g, best_loss);
      for (int64_t i = 0; i < out.prefix; ++i) {
        ++out.evaluations;
        const BucketPair p = g.at(i);
        if (PairIsValid(counts, spec, g.s1, p.b1, g.s2, p.b2)) {
          out.position = i;
          break;
        }
      }
      break;
    }
    case Pruning::kNone: {
      out.prefix = g.length();
      int64_t best = best_loss;
      for (int64_t i = 0; i < g.length(); ++i) {
        ++out.evaluations;
        const BucketPair p = g.at(i);
        if (PairIsValid(counts, spec, g.s1, p.b1, g.s2, p.b2) &&
            g.loss_at(i) < best) {
          best = g.loss_at(i);
          out.position = i;
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace

std::optional<SearchResult> TwoSizeBucketing(std::span<const int64_t> counts,
                                             const PrivacySpec& spec,
                                             const SearchConfig& config,
                                             const TwoSizeOptions& options,
                                             SearchStats* stats_out) {
  const int64_t n = std::accumulate(counts.begin(), counts.end(), int64_t{0});
  SearchStats stats;
  std::vector<SizePairTrace> trace;
  int64_t best_loss = kUnboundedLoss;
  std::optional<BucketSetting> best_setting;

  for (int64_t s1 = config.min_size; s1 < config.max_size; ++s1) {
    for (int64_t s2 = s1 + 1; s2 <= config.max_size; ++s2) {
      ++stats.size_pairs;
      SizePairTrace entry;
      entry.s1 = s1;
      entry.s2 = s2;
      const std::optional<GammaList> g = BuildGamma(n, s1, s2);
      if (!g.has_value()) {
        ++stats.empty_lists;
      } else {
        entry.list_length = g->length();
        const PairOutcome found =
            SearchList(*g, counts, spec, best_loss, options.pruning, stats);
        entry.prefix = found.prefix;
        entry.evaluations = found.evaluations;
        stats.evaluations += found.evaluations;
        if (found.position.has_value()) {
          const int64_t loss = g->loss_at(*found.position);
          entry.best = g->at(*found.position);
          if (loss < best_loss) {
            best_loss = loss;
            best_setting = *BucketSetting::Create(
                {{s1, entry.best->b1}, {s2, entry.best->b2}});
          }
        }
      }
      entry.best_loss = best_loss;
      if (options.record_trace) trace.push_back(entry);
    }
  }
  if (stats_out != nullptr) *stats_out = stats;
  if (!best_setting.has_value()) return std::nullopt;
  SearchResult result;
  result.setting = *best_setting;
  result.loss = best_loss;
  result.stats = stats;
  result.trace = std::move(trace);
  return result;
}

std::optional<SearchResult> OneSizeBucketing(std::span<const int64_t> counts,
                                             const PrivacySpec& spec,
                                             const SearchConfig& config) {
  const int64_t n = std::accumulate(counts.begin(), counts.end(), int64_t{0});
  std::optional<SearchResult> best;
  for (int64_t s = config.min_size; s <= config.max_size; ++s) {
    if (n % s != 0) continue;
    const int64_t b = n / s;
    if (!ValidateOneSize(counts, spec, s, b)) continue;
    const BucketGroup group{s, b};
    if (!best.has_value() || group.loss() < best->loss) {
      best = SearchResult{};
      best->setting = *BucketSetting::Create({group});
      best->loss = group.loss();
    }
  }
  return best;
}

namespace {

class BruteForceSearch {
 public:
  BruteForceSearch(std::span<const int64_t> counts, const PrivacySpec& spec,
                   const SearchConfig& config, int max_sizes, int64_t budget)
      : counts_(counts),
        spec_(spec),
        config_(config),
        max_sizes_(max_sizes),
        budget_(budget) {}

  absl::StatusOr<std::optional<SearchResult>> Run() {
    const int64_t n =
        std::accumulate(counts_.begin(), counts_.end(), int64_t{0});
    Visit(config_.min_size, n, 0);
    if (candidates_ > budget_) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "brute force exceeds its budget of ", budget_, " settings"));
    }
    if (!best_.has_value()) return std::optional<SearchResult>();
    SearchResult result;
    result.setting = *best_;
    result.loss = best_loss_;
    result.stats.evaluations = candidates_;
    return std::optional<SearchResult>(std::move(result));
  }

 private:
  void Visit(int64_t size, int64_t remaining, int64_t loss) {
    if (candidates_ > budget_) return;
    if (remaining == 0) {
      ++candidates_;
      if (loss < best_loss_) {
        auto setting = *BucketSetting::Create(groups_);
        if (FlowFeasible(counts_, spec_, setting)) {
          best_loss_ = loss;
          best_ = std::move(setting);
        }
      }
      return;
    }
    if (size > config_.max_size ||
        static_cast<int>(groups_.size()) >= max_sizes_ + 1) {
      return;
    }
    // Skip this size.
    Visit(size + 1, remaining, loss);
    if (static_cast<int>(groups_.size()) == max_sizes_) return;
    for (int64_t c = 1; c * size <= remaining; ++c) {
      groups_.push_back({size, c});
      Visit(size + 1, remaining - c * size, loss + groups_.back().loss());
      groups_.pop_back();
      if (candidates_ > budget_) return;
    }
  }

  std::span<const int64_t> counts_;
  const PrivacySpec& spec_;
  SearchConfig config_;
  int max_sizes_;
  int64_t budget_;
  int64_t candidates_ = 0;
  int64_t best_loss_ = kUnboundedLoss;
  std::optional<BucketSetting> best_;
  std::vector<BucketGroup> groups_;
};

}  // namespace

absl::StatusOr<std::optional<SearchResult>> BruteForceOptimal(
    std::span<const int64_t> counts, const PrivacySpec& spec,
    const SearchConfig& config, int max_sizes, int64_t budget) {
  if (max_sizes < 1) {
    return absl::InvalidArgumentError("max_sizes must be >= 1");
  }
  return BruteForceSearch(counts, spec, config, max_sizes, budget).Run();
}

absl::StatusOr<BucketSetting> AnatomyBaselineSetting(int64_t n, int64_t ell) {
  if (ell < 1) return absl::InvalidArgumentError("ell must be >= 1");
  if (n < ell) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot form buckets of size ", ell, " from ", n,
                     " records"));
  }
  // n = ell * small + (ell + 1) * large; fewest large buckets means
  // large = n mod ell.
  const int64_t large = n % ell;
  const int64_t rest = n - large * (ell + 1);
  if (rest < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        n, " records cannot be covered by buckets of size ", ell, " and ",
        ell + 1));
  }
  return BucketSetting::FromGroups(
      std::vector<BucketGroup>{{ell, rest / ell}, {ell + 1, large}});
}

absl::StatusOr<int64_t> AnatomyBaselineLoss(int64_t n, int64_t ell) {
  FPRIV_ASSIGN_OR_RETURN(BucketSetting setting,
                         AnatomyBaselineSetting(n, ell));
  return setting.loss();
}

absl::StatusOr<MultiSizeResult> MultiSizeBucketing(
    const MicrodataTable& table, std::span<const RecordId> subset,
    const BucketGroup& current, const PrivacySpec& spec,
    const SearchConfig& config) {
  if (current.capacity() != static_cast<int64_t>(subset.size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "group capacity ", current.capacity(), " does not match ",
        subset.size(), " records"));
  }
  MultiSizeResult result;
  struct Work {
    std::vector<RecordId> records;
    BucketGroup group;
  };
  std::vector<Work> stack;
  stack.push_back({std::vector<RecordId>(subset.begin(), subset.end()),
                   current});
  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    const SaHistogram hist = Histogram(table, work.records);
    std::optional<SearchResult> refined =
        TwoSizeBucketing(hist.counts(), spec, config);
    if (!refined.has_value() || refined->loss >= work.group.loss()) {
      result.leaves.push_back({std::move(work.records), work.group});
      continue;
    }
    result.refinements.emplace_back(work.group.loss(), refined->loss);
    FPRIV_ASSIGN_OR_RETURN(
        RecordPartition parts,
        PartitionRecords(table, work.records, spec, refined->setting));
    const auto& groups = refined->setting.groups();
    // Push the second group first so the first is refined first.
    if (groups[1].count > 0) {
      stack.push_back({std::move(parts.second), groups[1]});
    }
    if (groups[0].count > 0) {
      stack.push_back({std::move(parts.first), groups[0]});
    }
  }
  std::vector<BucketGroup> groups;
  for (const Leaf& leaf : result.leaves) {
    groups.push_back(leaf.group);
    result.loss += leaf.group.loss();
  }
  result.setting = BucketSetting::FromGroups(groups);
  return result;
}

absl::StatusOr<MultiSizeResult> MultiSizeBucketing(const MicrodataTable& table,
                                                   const PrivacySpec& spec,
                                                   const SearchConfig& config) {
  const std::vector<RecordId> all = AllRecords(table);
  return MultiSizeBucketing(table, all, BucketGroup{table.size(), 1}, spec,
                            config);
}

absl::StatusOr<Assignment> AssignLeaves(const MicrodataTable& table,
                                        std::span<const Leaf> leaves) {
  std::vector<size_t> order(leaves.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return leaves[a].group.size < leaves[b].group.size;
  });
  Assignment out;
  for (size_t idx : order) {
    const Leaf& leaf = leaves[idx];
    const auto by_value = GroupBySa(table, leaf.records);
    FPRIV_ASSIGN_OR_RETURN(
        Assignment part,
        RoundRobinAssign(by_value, leaf.group.size, leaf.group.count));
    out.Append(std::move(part));
  }
  return out;
}

}  // namespace fpriv
