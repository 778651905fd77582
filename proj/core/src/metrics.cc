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

#include "fpriv/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "fpriv/random.h"

namespace fpriv {

int64_t LossOf(const BucketSetting& setting) { return setting.loss(); }

int64_t LossOf(std::span<const int64_t> bucket_sizes) {
  int64_t loss = 0;
  for (int64_t s : bucket_sizes) loss += (s - 1) * (s - 1);
  return loss;
}

int64_t LossOf(const PublishedTables& pt) {
  int64_t loss = 0;
  for (const PublishedBucket& b : pt.buckets) {
    loss += (b.size() - 1) * (b.size() - 1);
  }
  return loss;
}

absl::StatusOr<double> MseOf(int64_t loss, int64_t n) {
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("MSE needs at least 2 records, got ", n));
  }
  return static_cast<double>(loss) / static_cast<double>(n - 1);
}

bool CountQuery::MatchesQi(std::span<const ValueId> values) const {
  for (const QueryPredicate& p : qi) {
    if (!p.admits[values[p.attribute]]) return false;
  }
  return true;
}

namespace {

std::vector<char> RandomSubset(Rng& rng, int32_t domain, int64_t size) {
  std::vector<int32_t> ids(domain);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<char> admits(domain, 0);
  for (int64_t i = 0; i < size; ++i) {
    const size_t j = static_cast<size_t>(i) + rng.Below(domain - i);
    std::swap(ids[i], ids[j]);
    admits[ids[i]] = 1;
  }
  return admits;
}

int64_t ValuesPerPredicate(double selectivity, int32_t dims, int32_t domain) {
  const double b =
      std::ceil(std::pow(selectivity, 1.0 / (dims + 1)) * domain - 1e-9);
  return std::clamp<int64_t>(static_cast<int64_t>(b), 1, domain);
}

}  // namespace

absl::StatusOr<std::vector<CountQuery>> GenQueries(
    std::span<const int32_t> qi_domains, int32_t sa_domain, int64_t pool_size,
    double selectivity, uint64_t seed) {
  if (!(selectivity > 0.0 && selectivity <= 1.0)) {
    return absl::InvalidArgumentError("selectivity must be in (0, 1]");
  }
  if (qi_domains.empty()) {
    return absl::InvalidArgumentError("queries need at least one QI");
  }
  if (pool_size < 0) return absl::InvalidArgumentError("pool size < 0");
  for (int32_t d : qi_domains) {
    if (d < 1) return absl::InvalidArgumentError("empty QI domain");
  }
  if (sa_domain < 1) return absl::InvalidArgumentError("empty SA domain");

  const int32_t d = static_cast<int32_t>(qi_domains.size());
  Rng rng(seed);
  std::vector<CountQuery> pool;
  pool.reserve(pool_size);
  for (int64_t k = 0; k < pool_size; ++k) {
    const int32_t dims = 1 + static_cast<int32_t>(rng.Below(d));
    std::vector<int32_t> attrs(d);
    std::iota(attrs.begin(), attrs.end(), 0);
    for (int32_t i = 0; i < dims; ++i) {
      const size_t j = static_cast<size_t>(i) + rng.Below(d - i);
      std::swap(attrs[i], attrs[j]);
    }
    attrs.resize(dims);
    std::sort(attrs.begin(), attrs.end());
    CountQuery q;
    for (int32_t a : attrs) {
      const int32_t dom = qi_domains[a];
      q.qi.push_back(
          {a, RandomSubset(rng, dom, ValuesPerPredicate(selectivity, dims, dom))});
    }
    q.sa_admits = RandomSubset(
        rng, sa_domain, ValuesPerPredicate(selectivity, dims, sa_domain));
    pool.push_back(std::move(q));
  }
  return pool;
}

int64_t AnswerTrue(const MicrodataTable& table, const CountQuery& q) {
  int64_t act = 0;
  for (const Record& r : table.records()) {
    if (q.sa_admits[r.sa] && q.MatchesQi(r.qi)) ++act;
  }
  return act;
}

double AnswerEstimated(const PublishedTables& pt, const CountQuery& q) {
  double est = 0;
  for (const PublishedBucket& b : pt.buckets) {
    if (b.st.empty()) continue;
    int64_t sa_match = 0;
    for (SaId x : b.st) sa_match += q.sa_admits[x] ? 1 : 0;
    if (sa_match == 0) continue;
    int64_t qi_match = 0;
    for (const auto& row : b.qit) qi_match += q.MatchesQi(row) ? 1 : 0;
    est += static_cast<double>(qi_match) * static_cast<double>(sa_match) /
           static_cast<double>(b.st.size());
  }
  return est;
}

absl::StatusOr<UtilityReport> RelativeError(std::span<const CountQuery> pool,
                                            const MicrodataTable& table,
                                            const PublishedTables& pt) {
  UtilityReport report;
  report.loss = LossOf(pt);
  if (auto mse = MseOf(report.loss, pt.record_count()); mse.ok()) {
    report.mse = *mse;
  }
  double sum = 0;
  for (const CountQuery& q : pool) {
    QueryOutcome out;
    out.act = AnswerTrue(table, q);
    if (out.act == 0) {
      ++report.excluded;
      continue;
    }
    out.est = AnswerEstimated(pt, q);
    out.re = std::abs(static_cast<double>(out.act) - out.est) /
             static_cast<double>(out.act);
    sum += out.re;
    report.queries.push_back(out);
  }
  report.query_count = static_cast<int64_t>(report.queries.size());
  if (report.query_count == 0) {
    return absl::FailedPreconditionError(
        "no query in the pool has a non-zero true answer");
  }
  report.re_mean = sum / static_cast<double>(report.query_count);
  return report;
}

}  // namespace fpriv
