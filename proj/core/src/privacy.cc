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

#include "fpriv/privacy.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "fpriv/csv.h"
#include "fpriv/status_macros.h"

namespace fpriv {

absl::StatusOr<PrivacySpec> PrivacySpec::Create(std::vector<double> thresholds) {
  if (thresholds.empty()) {
    return absl::InvalidArgumentError("privacy spec is empty");
  }
  for (size_t i = 0; i < thresholds.size(); ++i) {
    const double t = thresholds[i];
    if (!(t > 0.0 && t <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("threshold ", t, " for value ", i, " is outside (0, 1]"));
    }
  }
  return PrivacySpec(std::move(thresholds));
}

int64_t MaxPerBucket(double threshold, int64_t size) {
  return static_cast<int64_t>(
      std::floor(threshold * static_cast<double>(size) + kThresholdEpsilon));
}

absl::StatusOr<PrivacySpec> LinearPrivacySpec(const SaHistogram& hist,
                                              double theta, double intercept) {
  if (theta < 0.0 || intercept < 0.0) {
    return absl::InvalidArgumentError("theta and intercept must be >= 0");
  }
  std::vector<double> t(hist.domain_size());
  for (SaId i = 0; i < hist.domain_size(); ++i) {
    t[i] = std::min(1.0, theta * hist.freq(i) + intercept);
  }
  return PrivacySpec::Create(std::move(t));
}

absl::StatusOr<PrivacySpec> ApplyPrivacyFile(const std::string& path,
                                             const Dictionary& sa_dict,
                                             const PrivacySpec& base) {
  FPRIV_ASSIGN_OR_RETURN(std::vector<CsvRow> rows, ReadCsvFile(path));
  std::vector<double> t(base.thresholds().begin(), base.thresholds().end());
  int64_t applied = 0;
  for (size_t r = 0; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": row ", r + 1, " must have 2 fields"));
    }
    double value = 0.0;
    if (!absl::SimpleAtod(row[1], &value)) {
      if (r == 0) continue;  // header
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": row ", r + 1, ": '", row[1], "' is not a number"));
    }
    auto id = sa_dict.Find(row[0]);
    if (!id.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": row ", r + 1, ": unknown sensitive value '", row[0], "'"));
    }
    t[*id] = value;
    ++applied;
  }
  if (applied == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": no thresholds in privacy file"));
  }
  return PrivacySpec::Create(std::move(t));
}

bool CheckEligibility(const SaHistogram& hist, const PrivacySpec& spec) {
  for (SaId i = 0; i < hist.domain_size(); ++i) {
    if (hist.count(i) > MaxPerBucket(spec.threshold(i), hist.total())) {
      return false;
    }
  }
  return true;
}

namespace {

int64_t CeilInverse(double threshold) {
  return static_cast<int64_t>(std::ceil(1.0 / threshold - kThresholdEpsilon));
}

}  // namespace

int64_t EllForSpec(const PrivacySpec& spec) {
  const double lo = *std::min_element(spec.thresholds().begin(),
                                      spec.thresholds().end());
  return CeilInverse(lo);
}

int64_t DefaultMinSize(const PrivacySpec& spec) {
  const double hi = *std::max_element(spec.thresholds().begin(),
                                      spec.thresholds().end());
  return std::max<int64_t>(1, CeilInverse(hi));
}

}  // namespace fpriv
