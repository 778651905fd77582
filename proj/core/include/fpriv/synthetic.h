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

// Skewed synthetic microdata. SA value i (1-based) has weight
// (i + shift)^(-exponent); shift = 0 is plain Zipf.

#ifndef FPRIV_SYNTHETIC_H_
#define FPRIV_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/table.h"

namespace fpriv {

struct SyntheticConfig {
  int64_t n = 1000;
  int32_t m = 50;
  double zipf_exponent = 1.0;
  double zipf_shift = 0.0;
  std::vector<int32_t> qi_domains = {10, 10, 10};
  // Chance that a QI value is tied to the record's SA value instead of drawn
  // uniformly.
  double correlation = 0.0;
  uint64_t seed = 1;
};

// Normalized weights of the m SA values.
std::vector<double> ZipfWeights(int32_t m, double exponent, double shift);

// Exact per-value counts: one record each, the remaining n - m apportioned by
// largest remainder. Requires n >= m >= 1.
absl::StatusOr<std::vector<int64_t>> ZipfCounts(int64_t n, int32_t m,
                                                double exponent, double shift);

// SA columns "sa"; QI columns "q0", "q1", ...; values "v0", "v1", ... Records
// appear in seeded random order.
absl::StatusOr<MicrodataTable> GenSynthetic(const SyntheticConfig& config);

struct ZipfProfile {
  double exponent = 1.0;
  double shift = 0.0;
};

// Fits (exponent, shift) so the weights have the given max / min ratio and,
// as closely as the family allows, the given maximum. As shift grows the
// family tends to a geometric profile, which bounds the attainable maximum
// from below.
absl::StatusOr<ZipfProfile> FitZipfProfile(int32_t m, double fmin,
                                           double fmax);

}  // namespace fpriv

#endif  // FPRIV_SYNTHETIC_H_
