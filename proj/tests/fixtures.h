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

// Shared instances and independent oracles for tests and the acceptance
// runner. Oracles here deliberately avoid the library's search code.

#ifndef FPRIV_TESTS_FIXTURES_H_
#define FPRIV_TESTS_FIXTURES_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "fpriv/flow.h"
#include "fpriv/privacy.h"
#include "fpriv/random.h"
#include "fpriv/table.h"
#include "fpriv/validate.h"

namespace fpriv::testing {

// 50 records: x1..x8 once, x9..x12 six times, x13..x14 nine times, in value
// order. QI columns Gender and Zipcode.
inline MicrodataTable FiftyRecordTable() {
  CsvRow header = {"Gender", "Zipcode", "Disease"};
  std::vector<CsvRow> rows;
  int r = 0;
  auto add = [&](int value, int times) {
    for (int t = 0; t < times; ++t, ++r) {
      rows.push_back({r % 2 == 0 ? "M" : "F", absl::StrCat(54320 + r % 7),
                      absl::StrCat("x", value)});
    }
  };
  for (int v = 1; v <= 8; ++v) add(v, 1);
  for (int v = 9; v <= 12; ++v) add(v, 6);
  for (int v = 13; v <= 14; ++v) add(v, 9);
  return *MicrodataTable::FromRows(header, rows, "Disease");
}

inline PrivacySpec FiftyRecordSpec(const MicrodataTable& table) {
  return *LinearPrivacySpec(Histogram(table), 2.0, 0.05);
}

inline MicrodataTable FourPatientTable() {
  CsvRow header = {"Gender", "Zipcode", "Disease"};
  std::vector<CsvRow> rows = {{"M", "54321", "Brain Tumor"},
                              {"M", "54322", "Indigestion"},
                              {"F", "61234", "Cancer"},
                              {"F", "61434", "HIV"}};
  return *MicrodataTable::FromRows(header, rows, "Disease");
}

// Three-size instance: ten values with o = 5, f' = 0.2 and one with o = 20,
// f' = 1; buckets 10 x size 2, 5 x size 4, 3 x size 10.
struct ThreeSizeInstance {
  std::vector<int64_t> counts;
  PrivacySpec spec;
  BucketSetting setting;
};

inline ThreeSizeInstance ThreeSizeTrap() {
  std::vector<int64_t> counts(10, 5);
  counts.push_back(20);
  std::vector<double> t(10, 0.2);
  t.push_back(1.0);
  return {counts, *PrivacySpec::Create(t),
          *BucketSetting::Create({{2, 10}, {4, 5}, {10, 3}})};
}

struct RandomInstance {
  std::vector<int64_t> counts;
  PrivacySpec spec;
  int64_t n = 0;
};

// Counts >= 1 summing to n, thresholds on a 0.05 grid at least f_i (so the
// instance is eligible) unless `allow_ineligible`.
inline RandomInstance MakeRandomInstance(Rng& rng, int64_t max_n, int max_m,
                                         bool allow_ineligible = false) {
  const int m = 1 + static_cast<int>(rng.Below(max_m));
  const int64_t n = m + static_cast<int64_t>(rng.Below(max_n - m + 1));
  std::vector<int64_t> counts(m, 1);
  for (int64_t k = m; k < n; ++k) {
    // Skew towards low ids.
    const int i = static_cast<int>(rng.Below(rng.Below(m) + 1));
    ++counts[i];
  }
  std::vector<double> t(m);
  for (int i = 0; i < m; ++i) {
    const double f = static_cast<double>(counts[i]) / static_cast<double>(n);
    const double grid = 0.05 * static_cast<double>(1 + rng.Below(20));
    t[i] = allow_ineligible ? grid : std::max(grid, std::min(1.0, f * 1.2));
  }
  return {counts, *PrivacySpec::Create(t), n};
}

// All (b1, b2) >= 0 with s1 b1 + s2 b2 = n in descending b1, by enumeration.
inline std::vector<std::pair<int64_t, int64_t>> EnumeratePairs(int64_t n,
                                                               int64_t s1,
                                                               int64_t s2) {
  std::vector<std::pair<int64_t, int64_t>> out;
  for (int64_t b1 = n / s1; b1 >= 0; --b1) {
    const int64_t rest = n - s1 * b1;
    if (rest % s2 == 0) out.push_back({b1, rest / s2});
  }
  return out;
}

// Two-size validity decided by max flow, never by PC/FC/CC.
inline bool FlowValidPair(const std::vector<int64_t>& counts,
                          const PrivacySpec& spec, int64_t s1, int64_t b1,
                          int64_t s2, int64_t b2) {
  return FlowFeasible(counts, spec,
                      BucketSetting::FromGroups(std::vector<BucketGroup>{
                          {s1, b1}, {s2, b2}}));
}

// Exhaustive two-size optimum over min_size <= s1 < s2 <= max_size using the
// flow oracle. nullopt when nothing is valid.
inline std::optional<int64_t> OracleTwoSizeLoss(
    const std::vector<int64_t>& counts, const PrivacySpec& spec,
    int64_t min_size, int64_t max_size) {
  int64_t n = 0;
  for (int64_t c : counts) n += c;
  std::optional<int64_t> best;
  for (int64_t s1 = min_size; s1 < max_size; ++s1) {
    for (int64_t s2 = s1 + 1; s2 <= max_size; ++s2) {
      for (const auto& [b1, b2] : EnumeratePairs(n, s1, s2)) {
        const int64_t loss =
            b1 * (s1 - 1) * (s1 - 1) + b2 * (s2 - 1) * (s2 - 1);
        if (best.has_value() && loss >= *best) continue;
        if (FlowValidPair(counts, spec, s1, b1, s2, b2)) best = loss;
      }
    }
  }
  return best;
}

// Per-bucket check from raw counts: every bucket full and
// |g, x| <= floor(f' |g|).
inline bool AssignmentRespects(const MicrodataTable& table,
                               const PrivacySpec& spec,
                               const Assignment& assignment) {
  std::vector<int> seen(table.size(), 0);
  for (const Bucket& b : assignment.buckets) {
    if (static_cast<int64_t>(b.records.size()) != b.size) return false;
    std::vector<int64_t> per(table.sa_domain_size(), 0);
    for (RecordId r : b.records) {
      if (r < 0 || r >= table.size() || seen[r]++) return false;
      ++per[table.record(r).sa];
    }
    for (SaId i = 0; i < table.sa_domain_size(); ++i) {
      if (static_cast<double>(per[i]) >
          spec.threshold(i) * static_cast<double>(b.size) + 1e-9) {
        return false;
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

// Table with one QI column whose SA counts are `counts`.
inline MicrodataTable TableFromCounts(const std::vector<int64_t>& counts) {
  CsvRow header = {"q", "s"};
  std::vector<CsvRow> rows;
  for (size_t i = 0; i < counts.size(); ++i) {
    for (int64_t k = 0; k < counts[i]; ++k) {
      rows.push_back({absl::StrCat("z", rows.size() % 3), absl::StrCat("x", i)});
    }
  }
  return *MicrodataTable::FromRows(header, rows, "s");
}

}  // namespace fpriv::testing

#endif  // FPRIV_TESTS_FIXTURES_H_
