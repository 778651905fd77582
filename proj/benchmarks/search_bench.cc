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

#include <cstdint>
#include <vector>

#include "benchmark/benchmark.h"
#include "fpriv/dpsim.h"
#include "fpriv/optimize.h"
#include "fpriv/privacy.h"
#include "fpriv/synthetic.h"
#include "fpriv/table.h"

namespace fpriv {
namespace {

struct Instance {
  std::vector<int64_t> counts;
  PrivacySpec spec;
  SearchConfig config;
};

// Skewed histogram over 50 values, min f near 0.18% and max f near 7.5%.
Instance MakeInstance(int64_t n, double theta) {
  const ZipfProfile p = *FitZipfProfile(50, 0.0018, 0.075);
  std::vector<int64_t> counts = *ZipfCounts(n, 50, p.exponent, p.shift);
  PrivacySpec spec = *LinearPrivacySpec(SaHistogram(counts), theta, 0.02);
  SearchConfig config = *SearchConfig::ForSpec(spec, std::nullopt, 50);
  return {std::move(counts), std::move(spec), config};
}

// Arguments: table size, pruning mode (0 full, 1 loss only, 2 none).
void BM_TwoSize(benchmark::State& state) {
  const Instance inst = MakeInstance(state.range(0), 8.0);
  TwoSizeOptions options;
  options.pruning = static_cast<Pruning>(state.range(1));
  SearchStats stats;
  for (auto _ : state) {
    stats = {};
    auto r = TwoSizeBucketing(inst.counts, inst.spec, inst.config, options,
                              &stats);
    benchmark::DoNotOptimize(r);
  }
  state.counters["evaluations"] = static_cast<double>(stats.evaluations);
}
BENCHMARK(BM_TwoSize)
    ->ArgsProduct({{100'000, 200'000, 300'000, 400'000, 500'000}, {0, 1, 2}})
    ->Unit(benchmark::kMillisecond);

void BM_TwoSizeTheta(benchmark::State& state) {
  const Instance inst =
      MakeInstance(300'000, static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto r = TwoSizeBucketing(inst.counts, inst.spec, inst.config);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_TwoSizeTheta)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Arg(32)
    ->Unit(benchmark::kMillisecond);

void BM_MultiSize(benchmark::State& state) {
  const ZipfProfile p = *FitZipfProfile(50, 0.0018, 0.075);
  SyntheticConfig c;
  c.n = state.range(0);
  c.m = 50;
  c.zipf_exponent = p.exponent;
  c.zipf_shift = p.shift;
  const MicrodataTable t = *GenSynthetic(c);
  const PrivacySpec spec = *LinearPrivacySpec(Histogram(t), 8.0, 0.02);
  const SearchConfig config = *SearchConfig::ForSpec(spec, std::nullopt, 50);
  for (auto _ : state) {
    auto r = MultiSizeBucketing(t, spec, config);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_MultiSize)->Arg(50'000)->Arg(200'000)->Unit(benchmark::kMillisecond);

void BM_LaplaceMoments(benchmark::State& state) {
  const LaplaceMech mech = *LaplaceMech::Create(0.1);
  for (auto _ : state) {
    Moments m = SampleNoiseMoments(mech, state.range(0), 1);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LaplaceMoments)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fpriv

BENCHMARK_MAIN();
