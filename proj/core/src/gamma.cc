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

#include "fpriv/gamma.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace fpriv {

int64_t GammaList::loss_at(int64_t i) const {
  const BucketPair p = at(i);
  return p.b1 * (s1 - 1) * (s1 - 1) + p.b2 * (s2 - 1) * (s2 - 1);
}

int64_t GammaList::loss_step() const {
  return delta2 * (s2 - 1) * (s2 - 1) - delta1 * (s1 - 1) * (s1 - 1);
}

std::optional<GammaList> BuildGamma(int64_t n, int64_t s1, int64_t s2) {
  if (n < 1 || s1 < 1 || s2 <= s1) return std::nullopt;
  const int64_t g = std::gcd(s1, s2);
  if (n % g != 0) return std::nullopt;
  GammaList list;
  list.n = n;
  list.s1 = s1;
  list.s2 = s2;
  list.delta1 = s2 / g;
  list.delta2 = s1 / g;
  // Solutions in b2 repeat with period delta2, so the smallest one (if any)
  // lies in [0, delta2).
  for (int64_t b2 = 0; b2 < list.delta2; ++b2) {
    const int64_t rest = n - s2 * b2;
    if (rest < 0) return std::nullopt;
    if (rest % s1 == 0) {
      list.b1_0 = rest / s1;
      list.b2_0 = b2;
      list.k = list.b1_0 / list.delta1;
      return list;
    }
  }
  return std::nullopt;
}

absl::StatusOr<BucketPair> PairAt(const GammaList& g, int64_t i) {
  if (i < 0 || i > g.k) {
    return absl::OutOfRangeError(
        absl::StrCat("position ", i, " outside [0, ", g.k, "]"));
  }
  return g.at(i);
}

int64_t LossPrefix(const GammaList& g, int64_t best_loss) {
  if (best_loss == kUnboundedLoss) return g.length();
  const int64_t first = g.loss_at(0);
  if (best_loss <= first) return 0;
  const int64_t step = g.loss_step();
  // Largest count c with first + (c - 1) * step < best_loss.
  const int64_t count = (best_loss - first + step - 1) / step;
  return std::min(g.length(), count);
}

IndexRegion IndexRegion::Interval(int64_t lo, int64_t hi) {
  IndexRegion r;
  if (lo <= hi) r.intervals_.push_back({lo, hi});
  return r;
}

IndexRegion IndexRegion::FromIntervals(std::vector<IndexInterval> intervals) {
  std::erase_if(intervals, [](const IndexInterval& iv) { return iv.empty(); });
  std::sort(intervals.begin(), intervals.end(),
            [](const IndexInterval& a, const IndexInterval& b) {
              return a.lo < b.lo;
            });
  IndexRegion r;
  for (const IndexInterval& iv : intervals) {
    if (!r.intervals_.empty() && iv.lo <= r.intervals_.back().hi + 1) {
      r.intervals_.back().hi = std::max(r.intervals_.back().hi, iv.hi);
    } else {
      r.intervals_.push_back(iv);
    }
  }
  return r;
}

bool IndexRegion::Contains(int64_t i) const {
  for (const IndexInterval& iv : intervals_) {
    if (i >= iv.lo && i <= iv.hi) return true;
  }
  return false;
}

std::optional<int64_t> IndexRegion::First() const {
  if (intervals_.empty()) return std::nullopt;
  return intervals_.front().lo;
}

int64_t IndexRegion::Count() const {
  int64_t total = 0;
  for (const IndexInterval& iv : intervals_) total += iv.hi - iv.lo + 1;
  return total;
}

IndexRegion IndexRegion::Intersect(const IndexRegion& other) const {
  std::vector<IndexInterval> out;
  size_t a = 0;
  size_t b = 0;
  while (a < intervals_.size() && b < other.intervals_.size()) {
    const IndexInterval& x = intervals_[a];
    const IndexInterval& y = other.intervals_[b];
    const int64_t lo = std::max(x.lo, y.lo);
    const int64_t hi = std::min(x.hi, y.hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (x.hi < y.hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return FromIntervals(std::move(out));
}

IndexRegion IndexRegion::Union(const IndexRegion& other) const {
  std::vector<IndexInterval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return FromIntervals(std::move(all));
}

std::string IndexRegion::DebugString() const {
  if (intervals_.empty()) return "{}";
  return absl::StrJoin(intervals_, " u ",
                       [](std::string* out, const IndexInterval& iv) {
                         absl::StrAppend(out, "[", iv.lo, ",", iv.hi, "]");
                       });
}

namespace {

void Count(RegionStats* stats) {
  if (stats != nullptr) ++stats->evaluations;
}

// `pred` holds on a prefix of [lo, hi]; returns its last index, or lo - 1.
template <typename Pred>
int64_t LastTrue(int64_t lo, int64_t hi, Pred pred, RegionStats* stats) {
  int64_t left = lo;
  int64_t right = hi;
  int64_t answer = lo - 1;
  while (left <= right) {
    const int64_t mid = left + (right - left) / 2;
    Count(stats);
    if (pred(mid)) {
      answer = mid;
      left = mid + 1;
    } else {
      right = mid - 1;
    }
  }
  return answer;
}

// `pred` holds on a suffix of [lo, hi]; returns its first index, or hi + 1.
template <typename Pred>
int64_t FirstTrue(int64_t lo, int64_t hi, Pred pred, RegionStats* stats) {
  int64_t left = lo;
  int64_t right = hi;
  int64_t answer = hi + 1;
  while (left <= right) {
    const int64_t mid = left + (right - left) / 2;
    Count(stats);
    if (pred(mid)) {
      answer = mid;
      right = mid - 1;
    } else {
      left = mid + 1;
    }
  }
  return answer;
}

// Sum over values of min(cap_i * b, o_i) >= size * b.
bool FillHolds(std::span<const int64_t> counts,
               std::span<const int64_t> per_bucket, int64_t size, int64_t b) {
  int64_t fill = 0;
  const int64_t need = size * b;
  for (size_t i = 0; i < counts.size(); ++i) {
    fill += std::min(per_bucket[i] * b, counts[i]);
    if (fill >= need) return true;
  }
  return fill >= need;
}

std::vector<int64_t> PerBucketCaps(const PrivacySpec& spec, int64_t size) {
  std::vector<int64_t> caps(spec.domain_size());
  for (SaId i = 0; i < spec.domain_size(); ++i) {
    caps[i] = MaxPerBucket(spec.threshold(i), size);
  }
  return caps;
}

IndexRegion FcRegionWithCaps(const GammaList& g,
                             std::span<const int64_t> counts,
                             std::span<const int64_t> caps1,
                             std::span<const int64_t> caps2, int64_t prefix,
                             RegionStats* stats) {
  if (prefix <= 0) return {};
  const int64_t hi = prefix - 1;
  const int64_t first = FirstTrue(
      0, hi,
      [&](int64_t i) { return FillHolds(counts, caps1, g.s1, g.at(i).b1); },
      stats);
  const int64_t last = LastTrue(
      0, hi,
      [&](int64_t i) { return FillHolds(counts, caps2, g.s2, g.at(i).b2); },
      stats);
  return IndexRegion::Interval(first, last);
}

IndexRegion PcRegionWithCaps(const GammaList& g, int64_t count, int64_t cap1,
                             int64_t cap2, int64_t prefix, RegionStats* stats) {
  if (prefix <= 0) return {};
  const int64_t hi = prefix - 1;
  if (count == 0) return IndexRegion::Interval(0, hi);

  const int64_t first_only_end = LastTrue(
      0, hi, [&](int64_t i) { return cap1 * g.at(i).b1 >= count; }, stats);
  const int64_t second_only_start = FirstTrue(
      0, hi, [&](int64_t i) { return cap2 * g.at(i).b2 >= count; }, stats);

  std::vector<IndexInterval> parts = {{0, first_only_end},
                                      {second_only_start, hi}};
  const int64_t mid_lo = first_only_end + 1;
  const int64_t mid_hi = second_only_start - 1;
  if (mid_lo <= mid_hi) {
    auto combined = [&](int64_t i) {
      const BucketPair p = g.at(i);
      return cap1 * p.b1 + cap2 * p.b2 >= count;
    };
    if (cap2 * g.delta2 >= cap1 * g.delta1) {
      parts.push_back({FirstTrue(mid_lo, mid_hi, combined, stats), mid_hi});
    } else {
      parts.push_back({mid_lo, LastTrue(mid_lo, mid_hi, combined, stats)});
    }
  }
  IndexRegion region = IndexRegion::FromIntervals(std::move(parts));
  if (stats != nullptr && region.intervals().size() > 1) {
    ++stats->two_interval_cases;
  }
  return region;
}

}  // namespace

IndexRegion FcRegion(const GammaList& g, std::span<const int64_t> counts,
                     const PrivacySpec& spec, int64_t prefix,
                     RegionStats* stats) {
  const auto caps1 = PerBucketCaps(spec, g.s1);
  const auto caps2 = PerBucketCaps(spec, g.s2);
  return FcRegionWithCaps(g, counts, caps1, caps2, prefix, stats);
}

IndexRegion PcRegion(const GammaList& g, std::span<const int64_t> counts,
                     const PrivacySpec& spec, int64_t prefix, SaId value,
                     RegionStats* stats) {
  const double t = spec.threshold(value);
  return PcRegionWithCaps(g, counts[value], MaxPerBucket(t, g.s1),
                          MaxPerBucket(t, g.s2), prefix, stats);
}

IndexRegion ValidRegion(const GammaList& g, std::span<const int64_t> counts,
                        const PrivacySpec& spec, int64_t best_loss,
                        RegionStats* stats) {
  const int64_t prefix = LossPrefix(g, best_loss);
  if (prefix == 0) return {};
  const auto caps1 = PerBucketCaps(spec, g.s1);
  const auto caps2 = PerBucketCaps(spec, g.s2);
  IndexRegion region =
      FcRegionWithCaps(g, counts, caps1, caps2, prefix, stats);
  for (size_t i = 0; i < counts.size() && !region.empty(); ++i) {
    region = region.Intersect(
        PcRegionWithCaps(g, counts[i], caps1[i], caps2[i], prefix, stats));
  }
  return region;
}

}  // namespace fpriv
