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

#include "fpriv/dpsim.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "absl/strings/str_cat.h"

namespace fpriv {

double LaplacePdf(double z, double mu, double b) {
  return std::exp(-std::abs(z - mu) / b) / (2.0 * b);
}

double LaplaceCdf(double z, double mu, double b) {
  if (z < mu) return 0.5 * std::exp((z - mu) / b);
  return 1.0 - 0.5 * std::exp(-(z - mu) / b);
}

double LaplaceQuantile(double u, double mu, double b) {
  if (u < 0.5) return mu + b * std::log(2.0 * u);
  return mu - b * std::log(2.0 * (1.0 - u));
}

absl::StatusOr<LaplaceMech> LaplaceMech::Create(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  return LaplaceMech(epsilon);
}

double LaplaceMech::Noise(Rng& rng) const {
  return LaplaceQuantile(rng.OpenUnit(), 0.0, scale());
}

void Moments::Add(double v) {
  ++count_;
  const double delta = v - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (v - mean_);
}

void Moments::Merge(const Moments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n1 = static_cast<double>(count_);
  const double n2 = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  const double n = n1 + n2;
  mean_ += delta * n2 / n;
  m2_ += other.m2_ + delta * delta * n1 * n2 / n;
  count_ += other.count_;
}

double Moments::variance() const {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

namespace {

// Runs `chunk_fn(chunk_index, chunk_size)` over ceil(samples / kSampleChunk)
// chunks and merges the results in chunk order.
template <typename Result, typename ChunkFn>
std::vector<Result> RunChunks(int64_t samples, int workers, ChunkFn chunk_fn) {
  const int64_t chunks = (samples + kSampleChunk - 1) / kSampleChunk;
  std::vector<Result> results(chunks);
  if (workers <= 0) {
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = static_cast<int>(std::min<int64_t>(workers, std::max<int64_t>(chunks, 1)));
  auto run = [&](int w) {
    for (int64_t c = w; c < chunks; c += workers) {
      const int64_t size = std::min(kSampleChunk, samples - c * kSampleChunk);
      results[c] = chunk_fn(c, size);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (std::thread& t : threads) t.join();
  }
  return results;
}

}  // namespace

Moments SampleNoiseMoments(const LaplaceMech& mech, int64_t samples,
                           uint64_t seed, int workers) {
  const auto parts = RunChunks<Moments>(
      samples, workers, [&](int64_t chunk, int64_t size) {
        Rng rng(MixSeed(seed, chunk));
        Moments m;
        for (int64_t i = 0; i < size; ++i) m.Add(mech.Noise(rng));
        return m;
      });
  Moments total;
  for (const Moments& m : parts) total.Merge(m);
  return total;
}

std::vector<double> DrawNoise(const LaplaceMech& mech, int64_t samples,
                              uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(samples);
  for (double& v : out) v = mech.Noise(rng);
  return out;
}

double KsStatistic(std::span<const double> sorted,
                   const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f,
                             f - static_cast<double>(i) / n));
  }
  return d;
}

double MaxDensityRatio(const LaplaceMech& mech, double count, double lo,
                       double hi, int points) {
  const double b = mech.scale();
  double worst = 0;
  for (int k = 0; k < points; ++k) {
    const double z =
        points == 1 ? lo : lo + (hi - lo) * k / static_cast<double>(points - 1);
    // Ratio in log space; the densities themselves underflow far out.
    const double log_ratio =
        (std::abs(z - count - 1.0) - std::abs(z - count)) / b;
    worst = std::max(worst, std::exp(std::abs(log_ratio)));
  }
  return worst;
}

InferenceEstimate PredictInference(double x, double y, double scale) {
  InferenceEstimate e;
  e.x = x;
  e.y = y;
  e.scale = scale;
  const double r = y / x;
  const double excess = 2.0 * scale * scale / (x * x);
  e.predicted_mean = r * (1.0 + excess);
  e.predicted_variance = excess * (1.0 + r * r);
  return e;
}

absl::StatusOr<InferenceEstimate> InferenceExperiment(double x, double y,
                                                      const LaplaceMech& mech,
                                                      int64_t samples,
                                                      uint64_t seed,
                                                      int workers) {
  if (x < 1) return absl::InvalidArgumentError("x must be >= 1");
  if (y < 0 || y > x) {
    return absl::InvalidArgumentError("y must lie in [0, x]");
  }
  if (samples < 1) return absl::InvalidArgumentError("samples must be >= 1");
  if (x < 10.0 * mech.scale()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "x = ", x, " is below 10 times the noise scale ", mech.scale(),
        "; Y/X has no usable moments there"));
  }
  struct Part {
    Moments moments;
    int64_t rejected = 0;
  };
  const auto parts =
      RunChunks<Part>(samples, workers, [&](int64_t chunk, int64_t size) {
        Rng rng(MixSeed(seed, chunk));
        Part p;
        for (int64_t i = 0; i < size; ++i) {
          const double nx = mech.NoisyCount(x, rng);
          const double ny = mech.NoisyCount(y, rng);
          if (nx <= 0.5 * x) {
            ++p.rejected;
            continue;
          }
          p.moments.Add(ny / nx);
        }
        return p;
      });
  InferenceEstimate e = PredictInference(x, y, mech.scale());
  e.samples = samples;
  Moments total;
  for (const Part& p : parts) {
    total.Merge(p.moments);
    e.rejected += p.rejected;
  }
  e.accepted = total.count();
  e.mean = total.mean();
  e.variance = total.variance();
  return e;
}

absl::StatusOr<std::vector<InferenceEstimate>> ConvergenceSweep(
    double ratio, const LaplaceMech& mech, std::span<const double> x_values,
    int64_t samples, uint64_t seed, int workers) {
  if (ratio < 0 || ratio > 1) {
    return absl::InvalidArgumentError("ratio must lie in [0, 1]");
  }
  if (!std::is_sorted(x_values.begin(), x_values.end())) {
    return absl::InvalidArgumentError("x values must be ascending");
  }
  std::vector<InferenceEstimate> out;
  for (size_t i = 0; i < x_values.size(); ++i) {
    absl::StatusOr<InferenceEstimate> e =
        InferenceExperiment(x_values[i], ratio * x_values[i], mech, samples,
                            MixSeed(seed, i), workers);
    if (!e.ok()) return e.status();
    out.push_back(*e);
  }
  return out;
}

}  // namespace fpriv
