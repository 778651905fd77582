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

// The list of all (b1, b2) >= 0 with S1 b1 + S2 b2 = n, in descending b1, is
// an arithmetic progression
//
//   (b1_0 - i d1, b2_0 + i d2),  0 <= i <= k,
//
// with S1 d1 = S2 d2 = lcm(S1, S2) and k = floor(b1_0 / d1). Any position can
// be generated directly, so the list is never materialized. Loss grows
// strictly along the list, so the first valid position is the best pair for
// (S1, S2).
//
// Validity is located with binary searches:
//  * fill for S1 holds on a suffix, fill for S2 on a prefix;
//  * for each value, PC holds on the prefix where floor(f' S1) b1 >= o, on
//    the suffix where floor(f' S2) b2 >= o, and on a prefix or suffix of the
//    remaining middle stretch (its direction set by the sign of
//    floor(f' S2) d2 - floor(f' S1) d1).
// On the middle stretch both caps are below o, so PC there is a linear
// inequality in the position; it holds at both ends of the stretch whenever
// the prefix and suffix parts are non-empty. The per-value PC set is thus a
// single interval. Regions are still kept as sorted interval lists so that
// intersections stay exact without relying on that argument.

#ifndef FPRIV_GAMMA_H_
#define FPRIV_GAMMA_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/privacy.h"

namespace fpriv {

inline constexpr int64_t kUnboundedLoss = std::numeric_limits<int64_t>::max();

struct BucketPair {
  int64_t b1 = 0;
  int64_t b2 = 0;
  friend bool operator==(const BucketPair&, const BucketPair&) = default;
};

struct GammaList {
  int64_t n = 0;
  int64_t s1 = 0;
  int64_t s2 = 0;
  int64_t b1_0 = 0;
  int64_t b2_0 = 0;
  int64_t delta1 = 0;
  int64_t delta2 = 0;
  int64_t k = 0;  // last index

  int64_t length() const { return k + 1; }
  BucketPair at(int64_t i) const {
    return {b1_0 - i * delta1, b2_0 + i * delta2};
  }
  int64_t loss_at(int64_t i) const;
  // loss_at(i + 1) - loss_at(i); always positive.
  int64_t loss_step() const;
};

// Empty when S1 b1 + S2 b2 = n has no non-negative solution. Requires
// 1 <= S1 < S2 and n >= 1.
std::optional<GammaList> BuildGamma(int64_t n, int64_t s1, int64_t s2);

// Bounds-checked access.
absl::StatusOr<BucketPair> PairAt(const GammaList& g, int64_t i);

// Number of leading positions with loss strictly below `best_loss`
// (kUnboundedLoss keeps the whole list). May be 0.
int64_t LossPrefix(const GammaList& g, int64_t best_loss);

struct IndexInterval {
  int64_t lo = 0;
  int64_t hi = -1;  // inclusive
  bool empty() const { return hi < lo; }
  friend bool operator==(const IndexInterval&, const IndexInterval&) = default;
};

// Sorted, disjoint, non-adjacent intervals of Gamma positions.
class IndexRegion {
 public:
  IndexRegion() = default;
  static IndexRegion Interval(int64_t lo, int64_t hi);
  static IndexRegion FromIntervals(std::vector<IndexInterval> intervals);

  const std::vector<IndexInterval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool Contains(int64_t i) const;
  std::optional<int64_t> First() const;
  int64_t Count() const;

  IndexRegion Intersect(const IndexRegion& other) const;
  IndexRegion Union(const IndexRegion& other) const;

  std::string DebugString() const;
  friend bool operator==(const IndexRegion&, const IndexRegion&) = default;

 private:
  std::vector<IndexInterval> intervals_;
};

// Counters for the privacy-pruned search. `evaluations` counts positions
// probed by binary searches (or validated by a scan).
struct RegionStats {
  int64_t evaluations = 0;
  int64_t two_interval_cases = 0;  // PC sets found split; expected 0
};

// Positions in [0, prefix) satisfying both fill constraints.
IndexRegion FcRegion(const GammaList& g, std::span<const int64_t> counts,
                     const PrivacySpec& spec, int64_t prefix,
                     RegionStats* stats = nullptr);

// Positions in [0, prefix) satisfying the privacy constraint for `value`.
IndexRegion PcRegion(const GammaList& g, std::span<const int64_t> counts,
                     const PrivacySpec& spec, int64_t prefix, SaId value,
                     RegionStats* stats = nullptr);

// All valid positions whose loss is below `best_loss`. Its first position,
// if any, is the optimal pair for (S1, S2).
IndexRegion ValidRegion(const GammaList& g, std::span<const int64_t> counts,
                        const PrivacySpec& spec, int64_t best_loss,
                        RegionStats* stats = nullptr);

}  // namespace fpriv

#endif  // FPRIV_GAMMA_H_
