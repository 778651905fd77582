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

// Laplace mechanism for count queries and a Monte-Carlo check of how well
// the ratio Y/X of two noisy counts recovers y/x.
//
// For X = x + Lap(b), Y = y + Lap(b) independent, a second-order expansion
// around x gives
//   E[Y/X]   ~ (y/x)(1 + 2b^2/x^2)
//   var[Y/X] ~ (2b^2/x^2)(1 + (y/x)^2).
// The ratio has no finite moments when X can reach 0, so experiments require
// x >= 10b and drop samples with X <= x/2 (about e^(-x/2b)/2 of them).

#ifndef FPRIV_DPSIM_H_
#define FPRIV_DPSIM_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "fpriv/random.h"

namespace fpriv {

double LaplacePdf(double z, double mu, double b);
double LaplaceCdf(double z, double mu, double b);
// Inverse CDF; u in (0, 1).
double LaplaceQuantile(double u, double mu, double b);

class LaplaceMech {
 public:
  static absl::StatusOr<LaplaceMech> Create(double epsilon);

  double epsilon() const { return epsilon_; }
  double scale() const { return 1.0 / epsilon_; }
  double variance() const { return 2.0 * scale() * scale(); }

  double Noise(Rng& rng) const;
  // count + Lap(1 / epsilon).
  double NoisyCount(double count, Rng& rng) const {
    return count + Noise(rng);
  }

 private:
  explicit LaplaceMech(double epsilon) : epsilon_(epsilon) {}
  double epsilon_;
};

// Streaming mean and variance; Merge() combines partial results.
class Moments {
 public:
  void Add(double v);
  void Merge(const Moments& other);

  int64_t count() const { return count_; }
  double mean() const { return mean_; }
  // Unbiased sample variance; 0 with fewer than two values.
  double variance() const;

 private:
  int64_t count_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

// Samples are drawn in fixed-size chunks with seeds derived from `seed` and
// merged in chunk order, so results do not depend on `workers`. workers = 0
// uses the hardware concurrency.
inline constexpr int64_t kSampleChunk = 1 << 16;

Moments SampleNoiseMoments(const LaplaceMech& mech, int64_t samples,
                           uint64_t seed, int workers = 0);

// Noise draws for a single chunk stream, for distribution tests.
std::vector<double> DrawNoise(const LaplaceMech& mech, int64_t samples,
                              uint64_t seed);

// sup_z |F_n(z) - F(z)| for the empirical CDF of `sorted` against `cdf`.
double KsStatistic(std::span<const double> sorted,
                   const std::function<double(double)>& cdf);

// Largest pdf(z | c) / pdf(z | c + 1) and its inverse over `points` grid
// points evenly spaced on [lo, hi].
double MaxDensityRatio(const LaplaceMech& mech, double count, double lo,
                       double hi, int points);

struct InferenceEstimate {
  double x = 0;
  double y = 0;
  double scale = 0;
  int64_t samples = 0;   // requested
  int64_t accepted = 0;
  int64_t rejected = 0;  // X <= x / 2
  double mean = 0;
  double variance = 0;
  double predicted_mean = 0;
  double predicted_variance = 0;

  double rejection_rate() const {
    return samples > 0 ? static_cast<double>(rejected) / samples : 0.0;
  }
};

// Taylor predictions only.
InferenceEstimate PredictInference(double x, double y, double scale);

// Requires x >= 1, 0 <= y <= x, x >= 10 * scale and samples >= 1.
absl::StatusOr<InferenceEstimate> InferenceExperiment(double x, double y,
                                                      const LaplaceMech& mech,
                                                      int64_t samples,
                                                      uint64_t seed,
                                                      int workers = 0);

// One experiment per x with y = ratio * x. x_values must be ascending.
absl::StatusOr<std::vector<InferenceEstimate>> ConvergenceSweep(
    double ratio, const LaplaceMech& mech, std::span<const double> x_values,
    int64_t samples, uint64_t seed, int workers = 0);

}  // namespace fpriv

#endif  // FPRIV_DPSIM_H_
