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

// Utility of a bucketization: loss, MSE and relative error of count queries.

#ifndef FPRIV_METRICS_H_
#define FPRIV_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/publish.h"
#include "fpriv/table.h"
#include "fpriv/validate.h"

namespace fpriv {

// Sum of (|g| - 1)^2.
int64_t LossOf(const BucketSetting& setting);
int64_t LossOf(std::span<const int64_t> bucket_sizes);
int64_t LossOf(const PublishedTables& pt);

// loss / (n - 1). Requires n >= 2.
absl::StatusOr<double> MseOf(int64_t loss, int64_t n);

struct QueryPredicate {
  int32_t attribute = 0;
  std::vector<char> admits;  // indexed by value id
};

// SELECT COUNT(*) WHERE A_1 IN (...) AND ... AND SA IN (...).
struct CountQuery {
  std::vector<QueryPredicate> qi;  // ascending attribute
  std::vector<char> sa_admits;     // indexed by SA id

  int32_t dimensionality() const { return static_cast<int32_t>(qi.size()); }
  bool MatchesQi(std::span<const ValueId> values) const;
};

// q_d is uniform over 1..#QI; q_d distinct attributes are drawn uniformly.
// Each predicate, including the one on SA, admits
// b = ceil(selectivity^(1 / (q_d + 1)) * |domain|) values drawn uniformly,
// clamped to [1, |domain|].
absl::StatusOr<std::vector<CountQuery>> GenQueries(
    std::span<const int32_t> qi_domains, int32_t sa_domain, int64_t pool_size,
    double selectivity, uint64_t seed);

int64_t AnswerTrue(const MicrodataTable& table, const CountQuery& q);

// Anatomy estimator: sum over buckets of
// (QIT rows matching the QI predicates) * (ST rows matching SA) / |ST_g|.
double AnswerEstimated(const PublishedTables& pt, const CountQuery& q);

struct QueryOutcome {
  int64_t act = 0;
  double est = 0;
  double re = 0;
};

struct UtilityReport {
  int64_t loss = 0;
  double mse = 0;
  double re_mean = 0;
  int64_t query_count = 0;  // queries with act > 0
  int64_t excluded = 0;     // queries with act == 0
  std::vector<QueryOutcome> queries;
};

// Mean |act - est| / act over queries with act > 0; fails when none remain.
absl::StatusOr<UtilityReport> RelativeError(std::span<const CountQuery> pool,
                                            const MicrodataTable& table,
                                            const PublishedTables& pt);

}  // namespace fpriv

#endif  // FPRIV_METRICS_H_
