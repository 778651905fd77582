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

// Per-value privacy thresholds: a published table satisfies the spec when no
// SA value x_i has a within-bucket frequency above its threshold f'_i.

#ifndef FPRIV_PRIVACY_H_
#define FPRIV_PRIVACY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/table.h"

namespace fpriv {

// Added before flooring f'_i * S so that thresholds such as 0.29, which are
// not exact in binary, still give floor(0.29 * 100) == 29.
inline constexpr double kThresholdEpsilon = 1e-9;

class PrivacySpec {
 public:
  // Every threshold must lie in (0, 1].
  static absl::StatusOr<PrivacySpec> Create(std::vector<double> thresholds);

  int32_t domain_size() const { return static_cast<int32_t>(thresholds_.size()); }
  double threshold(SaId i) const { return thresholds_[i]; }
  std::span<const double> thresholds() const { return thresholds_; }

 private:
  explicit PrivacySpec(std::vector<double> t) : thresholds_(std::move(t)) {}
  std::vector<double> thresholds_;
};

// floor(threshold * size): the most occurrences of one value a bucket of
// `size` can hold.
int64_t MaxPerBucket(double threshold, int64_t size);

// f'_i = min{1, theta * f_i + intercept}.
absl::StatusOr<PrivacySpec> LinearPrivacySpec(const SaHistogram& hist,
                                              double theta, double intercept);

// Reads `sa_value,threshold` rows (an optional header is skipped) and
// overrides the matching entries of `base`. Unknown values, thresholds outside
// (0, 1] and empty files are errors.
absl::StatusOr<PrivacySpec> ApplyPrivacyFile(const std::string& path,
                                             const Dictionary& sa_dict,
                                             const PrivacySpec& base);

// A spec-satisfying bucketization exists iff f'_i >= f_i for all i. Compared
// in integer form: o_i <= floor(f'_i * |T|).
bool CheckEligibility(const SaHistogram& hist, const PrivacySpec& spec);

// ceil(1 / min_i f'_i): the l-diversity level that models the spec.
int64_t EllForSpec(const PrivacySpec& spec);

// min_i ceil(1 / f'_i): the smallest bucket size that can host any value.
int64_t DefaultMinSize(const PrivacySpec& spec);

}  // namespace fpriv

#endif  // FPRIV_PRIVACY_H_
