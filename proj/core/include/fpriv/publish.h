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

// Published form of a bucketized table: QIT(QI..., BID) and ST(BID, SA), plus
// fake SA values injected against corruption and negative-association
// attacks. Bucket ids are 0-based in memory and 1-based in files.

#ifndef FPRIV_PUBLISH_H_
#define FPRIV_PUBLISH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/privacy.h"
#include "fpriv/table.h"
#include "fpriv/validate.h"

namespace fpriv {

struct PublishedBucket {
  std::vector<std::vector<ValueId>> qit;  // QI values of each real record
  std::vector<SaId> st;                   // real and fake values, shuffled
  std::vector<SaId> fakes;                // private ground truth, sorted

  int64_t size() const { return static_cast<int64_t>(qit.size()); }
};

struct PublishedTables {
  std::vector<std::string> qi_names;
  std::string sa_name;
  std::vector<Dictionary> qi_dicts;
  Dictionary sa_dict;
  std::vector<PublishedBucket> buckets;
  int64_t sigma = 0;

  int64_t record_count() const;
  int64_t st_row_count() const;
};

// Rows keep assignment order in QIT; each bucket's ST rows are shuffled with
// a per-bucket seed derived from `seed`.
PublishedTables Publish(const MicrodataTable& table,
                        const Assignment& assignment, uint64_t seed);

// (QI attribute, QI value, SA value) pairs that rarely share a bucket.
class NegAssociationModel {
 public:
  using Key = std::tuple<int32_t, ValueId, SaId>;

  NegAssociationModel() = default;
  explicit NegAssociationModel(std::map<Key, double> scores)
      : flagged_(std::move(scores)) {}

  bool IsNegative(int32_t attribute, ValueId z, SaId x) const {
    return flagged_.contains({attribute, z, x});
  }
  // Pairs flagged, each with observed / expected co-occurrence.
  const std::map<Key, double>& flagged() const { return flagged_; }

 private:
  std::map<Key, double> flagged_;
};

// Observed co-occurrence of (z, x) is sum over buckets of
// count_g(z) * count_g(x) / |ST_g|; the expectation under independence is
// count(z) * count(x) / |ST|. Pairs with observed < threshold * expected are
// flagged.
NegAssociationModel LearnNegativeAssociations(const PublishedTables& pt,
                                              double threshold);

// Adds `sigma` distinct fake values to each bucket, drawn uniformly without
// replacement from the SA values not already in the bucket and, with a
// model, not negatively associated with any QI value in the bucket. Requires
// distinct real values per bucket when sigma > 0.
absl::StatusOr<PublishedTables> InjectFakes(
    const PublishedTables& pt, int64_t sigma, uint64_t seed,
    const NegAssociationModel* model = nullptr);

// A record whose SA value the adversary knows.
struct CorruptedRecord {
  int64_t bucket = 0;
  SaId sa = 0;
};

struct BucketInference {
  int64_t bucket = 0;
  int64_t corrupted = 0;
  int64_t remaining = 0;       // ST values left after exclusion
  double real_certainty = 1;   // chance a remaining value is real
  double fake_fraction = 0;    // sigma / remaining
  std::map<SaId, double> probability;  // per remaining value
  double max_probability = 0;
};

struct CorruptionReport {
  std::vector<BucketInference> buckets;
  double max_probability = 0;
};

// Excludes each corrupted record's value from its bucket's ST. Fake positions
// are unknown to the adversary, so a remaining value is real with chance
// (|g| - q) / (|g| + sigma - q).
absl::StatusOr<CorruptionReport> CorruptionAttackSim(
    const PublishedTables& pt, std::span<const CorruptedRecord> corrupted);

struct PrivacyViolation {
  int64_t bucket = 0;
  SaId value = 0;
  int64_t count = 0;
  int64_t bucket_size = 0;
};

struct PrivacyRecheck {
  std::vector<double> max_ratio;  // per SA value, over buckets
  std::vector<PrivacyViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Recomputes count_g(x) / |ST_g| for every bucket and value.
PrivacyRecheck RecheckPrivacy(const PublishedTables& pt,
                              const PrivacySpec& spec);

// Drops the audited fakes first and divides by |g|. Matches RecheckPrivacy()
// when sigma is 0.
PrivacyRecheck RecheckRealRecords(const PublishedTables& pt,
                                  const PrivacySpec& spec);

inline constexpr char kQitFile[] = "qit.csv";
inline constexpr char kStFile[] = "st.csv";
inline constexpr char kFakesAuditFile[] = "fakes_audit.json";

// Writes qit.csv, st.csv and fakes_audit.json into `dir`, which must exist.
absl::Status WritePublished(const PublishedTables& pt, const std::string& dir);

// Reads the files back. With a `schema`, values are interned into its
// dictionaries (so ids match the source table) and unknown values are
// errors. The audit file is optional.
absl::StatusOr<PublishedTables> ReadPublished(
    const std::string& dir, const MicrodataTable* schema = nullptr);

}  // namespace fpriv

#endif  // FPRIV_PUBLISH_H_
