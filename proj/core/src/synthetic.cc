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

#include "fpriv/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "fpriv/random.h"
#include "fpriv/status_macros.h"

namespace fpriv {

std::vector<double> ZipfWeights(int32_t m, double exponent, double shift) {
  std::vector<double> w(m);
  // Relative to the first weight, to stay finite for large exponents.
  const double base = std::log(1.0 + shift);
  double total = 0;
  for (int32_t i = 0; i < m; ++i) {
    w[i] = std::exp(-exponent * (std::log(i + 1.0 + shift) - base));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

absl::StatusOr<std::vector<int64_t>> ZipfCounts(int64_t n, int32_t m,
                                                double exponent,
                                                double shift) {
  if (m < 1 || n < m) {
    return absl::InvalidArgumentError(
        absl::StrCat("need n >= m >= 1, got n=", n, " m=", m));
  }
  if (shift < 0 || exponent < 0) {
    return absl::InvalidArgumentError("exponent and shift must be >= 0");
  }
  const std::vector<double> w = ZipfWeights(m, exponent, shift);
  const int64_t extra = n - m;
  std::vector<int64_t> counts(m, 1);
  std::vector<std::pair<double, int32_t>> remainders(m);
  int64_t given = 0;
  for (int32_t i = 0; i < m; ++i) {
    const double share = w[i] * static_cast<double>(extra);
    const int64_t whole = static_cast<int64_t>(std::floor(share));
    counts[i] += whole;
    given += whole;
    remainders[i] = {share - static_cast<double>(whole), i};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int64_t k = 0; given < extra; ++k, ++given) {
    ++counts[remainders[k % m].second];
  }
  return counts;
}

absl::StatusOr<MicrodataTable> GenSynthetic(const SyntheticConfig& config) {
  FPRIV_ASSIGN_OR_RETURN(
      std::vector<int64_t> counts,
      ZipfCounts(config.n, config.m, config.zipf_exponent, config.zipf_shift));
  if (config.qi_domains.empty()) {
    return absl::InvalidArgumentError("need at least one QI attribute");
  }
  if (config.correlation < 0 || config.correlation > 1) {
    return absl::InvalidArgumentError("correlation must be in [0, 1]");
  }
  std::vector<std::string> qi_names;
  std::vector<Dictionary> qi_dicts(config.qi_domains.size());
  for (size_t a = 0; a < config.qi_domains.size(); ++a) {
    if (config.qi_domains[a] < 1) {
      return absl::InvalidArgumentError("QI domains must be >= 1");
    }
    qi_names.push_back(absl::StrCat("q", a));
    for (int32_t v = 0; v < config.qi_domains[a]; ++v) {
      qi_dicts[a].Intern(absl::StrCat("a", v));
    }
  }
  Dictionary sa_dict;
  for (int32_t i = 0; i < config.m; ++i) sa_dict.Intern(absl::StrCat("v", i));

  std::vector<SaId> sa;
  sa.reserve(config.n);
  for (int32_t i = 0; i < config.m; ++i) sa.insert(sa.end(), counts[i], i);
  Rng rng(config.seed);
  rng.Shuffle(std::span<SaId>(sa));

  std::vector<Record> records(config.n);
  for (int64_t r = 0; r < config.n; ++r) {
    records[r].sa = sa[r];
    records[r].qi.resize(config.qi_domains.size());
    for (size_t a = 0; a < config.qi_domains.size(); ++a) {
      const int32_t dom = config.qi_domains[a];
      const bool tied =
          config.correlation > 0 && rng.OpenUnit() < config.correlation;
      records[r].qi[a] = tied ? sa[r] % dom
                              : static_cast<ValueId>(rng.Below(dom));
    }
  }
  return MicrodataTable::Create(std::move(qi_names), "sa", std::move(qi_dicts),
                                std::move(sa_dict), std::move(records));
}

absl::StatusOr<ZipfProfile> FitZipfProfile(int32_t m, double fmin,
                                           double fmax) {
  if (m < 2 || !(fmin > 0) || !(fmax > fmin) || fmax >= 1) {
    return absl::InvalidArgumentError("need m >= 2 and 0 < fmin < fmax < 1");
  }
  const double ratio = fmax / fmin;
  auto exponent_for = [&](double shift) {
    return std::log(ratio) / std::log((m + shift) / (1.0 + shift));
  };
  auto max_for = [&](double shift) {
    return ZipfWeights(m, exponent_for(shift), shift).front();
  };
  // The maximum weight decreases in the shift at a fixed ratio.
  double lo = 0;
  double hi = 1e6;
  if (max_for(lo) <= fmax) return ZipfProfile{exponent_for(lo), lo};
  if (max_for(hi) >= fmax) return ZipfProfile{exponent_for(hi), hi};
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (max_for(mid) > fmax) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return ZipfProfile{exponent_for(hi), hi};
}

}  // namespace fpriv
