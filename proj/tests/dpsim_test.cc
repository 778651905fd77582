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
#include <vector>

#include "gtest/gtest.h"

namespace fpriv {
namespace {

TEST(LaplaceTest, DistributionFunctions) {
  EXPECT_DOUBLE_EQ(LaplaceCdf(0, 0, 1), 0.5);
  EXPECT_DOUBLE_EQ(LaplacePdf(0, 0, 2), 0.25);
  for (double u : {0.01, 0.2, 0.5, 0.7, 0.999}) {
    EXPECT_NEAR(LaplaceCdf(LaplaceQuantile(u, 3, 2), 3, 2), u, 1e-12);
  }
  EXPECT_NEAR(LaplaceCdf(1, 0, 1) - LaplaceCdf(-1, 0, 1), 1 - std::exp(-1.0),
              1e-12);
}

TEST(LaplaceTest, RejectsBadEpsilon) {
  EXPECT_FALSE(LaplaceMech::Create(0).ok());
  EXPECT_FALSE(LaplaceMech::Create(-1).ok());
  EXPECT_FALSE(LaplaceMech::Create(std::nan("")).ok());
  auto m = LaplaceMech::Create(0.5);
  ASSERT_TRUE(m.ok());
  EXPECT_DOUBLE_EQ(m->scale(), 2.0);
  EXPECT_DOUBLE_EQ(m->variance(), 8.0);
}

TEST(LaplaceTest, SampleMoments) {
  for (double eps : {0.1, 1.0}) {
    const LaplaceMech m = *LaplaceMech::Create(eps);
    const Moments mo = SampleNoiseMoments(m, 1'000'000, 11);
    EXPECT_EQ(mo.count(), 1'000'000);
    EXPECT_LT(std::abs(mo.mean()), 0.05 * m.scale());
    EXPECT_NEAR(mo.variance(), m.variance(), 0.05 * m.variance());
  }
}

TEST(LaplaceTest, KolmogorovSmirnov) {
  const LaplaceMech m = *LaplaceMech::Create(1.0);
  std::vector<double> draws = DrawNoise(m, 1'000'000, 5);
  std::sort(draws.begin(), draws.end());
  const double d =
      KsStatistic(draws, [&](double z) { return LaplaceCdf(z, 0, m.scale()); });
  EXPECT_LT(d, 0.002);
}

TEST(LaplaceTest, DensityRatioBound) {
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    const LaplaceMech m = *LaplaceMech::Create(eps);
    const double ratio = MaxDensityRatio(m, 20, -100, 140, 1000);
    EXPECT_LE(ratio, std::exp(eps) * (1 + 1e-9));
    EXPECT_GT(ratio, std::exp(eps) * 0.99);
  }
}

TEST(LaplaceTest, ChunkedSamplingIgnoresWorkerCount) {
  const LaplaceMech m = *LaplaceMech::Create(0.3);
  const int64_t n = 3 * kSampleChunk + 17;
  const Moments a = SampleNoiseMoments(m, n, 9, 1);
  const Moments b = SampleNoiseMoments(m, n, 9, 3);
  EXPECT_EQ(a.count(), n);
  EXPECT_DOUBLE_EQ(a.mean(), b.mean());
  EXPECT_DOUBLE_EQ(a.variance(), b.variance());
  const Moments c = SampleNoiseMoments(m, n, 10, 1);
  EXPECT_NE(a.mean(), c.mean());
}

TEST(MomentsTest, MergeMatchesSequential) {
  Moments all, left, right;
  for (int i = 0; i < 100; ++i) {
    const double v = std::sin(i) * 10 + i * 0.1;
    all.Add(v);
    (i < 37 ? left : right).Add(v);
  }
  left.Merge(right);
  EXPECT_EQ(left.count(), 100);
  EXPECT_NEAR(left.mean(), all.mean(), 1e-12);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-10);
}

TEST(InferenceTest, Predictions) {
  const InferenceEstimate near = PredictInference(10, 5, 1);
  EXPECT_NEAR(near.predicted_mean, 0.5 * 1.02, 1e-12);
  const InferenceEstimate far = PredictInference(100, 50, 1);
  EXPECT_NEAR(far.predicted_mean, 0.5 * 1.0002, 1e-12);
  EXPECT_NEAR(far.predicted_variance, 2e-4 * 1.25, 1e-15);
  EXPECT_DOUBLE_EQ(PredictInference(100, 0, 1).predicted_mean, 0.0);
}

TEST(InferenceTest, ExperimentTracksPrediction) {
  const LaplaceMech m = *LaplaceMech::Create(0.1);
  auto e = InferenceExperiment(100, 50, m, 400'000, 3);
  ASSERT_TRUE(e.ok());
  EXPECT_EQ(e->accepted + e->rejected, e->samples);
  EXPECT_LT(e->rejection_rate(), 0.01);
  EXPECT_NEAR(e->mean, e->predicted_mean, 0.01);
  EXPECT_NEAR(e->variance, e->predicted_variance, 0.2 * e->predicted_variance);
}

TEST(InferenceTest, ZeroCountStaysCentred) {
  const LaplaceMech m = *LaplaceMech::Create(1.0);
  auto e = InferenceExperiment(50, 0, m, 200'000, 4);
  ASSERT_TRUE(e.ok());
  EXPECT_NEAR(e->mean, 0.0, 1e-3);
  EXPECT_NEAR(e->variance, e->predicted_variance, 0.1 * e->predicted_variance);
}

TEST(InferenceTest, Gates) {
  const LaplaceMech m = *LaplaceMech::Create(1.0);
  EXPECT_FALSE(InferenceExperiment(0.5, 0, m, 10, 1).ok());
  EXPECT_FALSE(InferenceExperiment(20, 30, m, 10, 1).ok());
  EXPECT_FALSE(InferenceExperiment(20, -1, m, 10, 1).ok());
  EXPECT_FALSE(InferenceExperiment(5, 1, m, 10, 1).ok());
  EXPECT_FALSE(InferenceExperiment(20, 1, m, 0, 1).ok());
  const std::vector<double> xs = {100, 10};
  EXPECT_FALSE(ConvergenceSweep(0.5, m, xs, 10, 1).ok());
  const std::vector<double> ok_xs = {10, 100};
  EXPECT_FALSE(ConvergenceSweep(1.5, m, ok_xs, 10, 1).ok());
}

TEST(InferenceTest, SweepShrinksTowardsRatio) {
  const LaplaceMech m = *LaplaceMech::Create(0.5);
  const std::vector<double> xs = {20, 80, 320, 1280};
  auto sweep = ConvergenceSweep(0.3, m, xs, 200'000, 8);
  ASSERT_TRUE(sweep.ok());
  ASSERT_EQ(sweep->size(), xs.size());
  for (size_t i = 1; i < sweep->size(); ++i) {
    EXPECT_LT((*sweep)[i].variance, (*sweep)[i - 1].variance);
    EXPECT_LT((*sweep)[i].predicted_mean, (*sweep)[i - 1].predicted_mean);
  }
  EXPECT_NEAR(sweep->back().mean, 0.3, 1e-3);
}

}  // namespace
}  // namespace fpriv
