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

// Runs the ten acceptance checks and prints one PASS/FAIL line for each.
// Exit status is non-zero if any check fails, unless that check was named
// with --known-failure=N. A known failure that passes is also an error.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/strings/str_cat.h"
#include "fixtures.h"
#include "fpriv/dpsim.h"
#include "fpriv/flow.h"
#include "fpriv/gamma.h"
#include "fpriv/metrics.h"
#include "fpriv/optimize.h"
#include "fpriv/publish.h"
#include "fpriv/synthetic.h"

namespace fpriv {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------- 1
Outcome GammaGolden() {
  const std::vector<BucketPair> want = {{14, 0}, {12, 1}, {10, 2}, {8, 3},
                                        {6, 4},  {4, 5},  {2, 6},  {0, 7}};
  const auto start = Clock::now();
  std::optional<GammaList> g;
  std::vector<BucketPair> got;
  constexpr int kReps = 1000;
  for (int rep = 0; rep < kReps; ++rep) {
    g = BuildGamma(28, 2, 4);
    got.clear();
    for (int64_t i = 0; g.has_value() && i < g->length(); ++i) {
      got.push_back(g->at(i));
    }
  }
  const double per_call_ms = SecondsSince(start) * 1e3 / kReps;
  const bool ok = got == want && per_call_ms < 1.0;
  return {ok, absl::StrCat("pairs=", got.size(), " per_call_ms=", per_call_ms)};
}

// ---------------------------------------------------------------- 2
Outcome FiftyRecordEndToEnd() {
  const MicrodataTable t = testing::FiftyRecordTable();
  const PrivacySpec p = testing::FiftyRecordSpec(t);
  const SaHistogram h = Histogram(t);
  const BucketSetting s = *BucketSetting::Create({{4, 9}, {14, 1}});
  auto valid = ValidateTwoSize(h.counts(), p, s);
  if (!valid.ok() || !valid->ok()) return {false, "setting rejected"};
  const AllocationBounds ab = ComputeAllocationBounds(h.counts(), p, s);
  for (SaId i = 0; i < 14; ++i) {
    const int64_t a1 = i < 8 ? 0 : (i < 12 ? 6 : 9);
    const int64_t a2 = i < 8 ? 1 : (i < 12 ? 4 : 5);
    if (ab.allowed[0][i] != a1 || ab.allowed[1][i] != a2) {
      return {false, absl::StrCat("allocation mismatch at value ", i)};
    }
  }
  auto parts = PartitionRecords(t, AllRecords(t), p, s);
  if (!parts.ok()) return {false, std::string(parts.status().message())};
  auto a = AssignTwoSize(t, AllRecords(t), p, s);
  if (!a.ok()) return {false, std::string(a.status().message())};
  const bool verified = VerifyAssignment(t, p, *a).ok() &&
                        testing::AssignmentRespects(t, p, *a);
  return {parts->moves == 6 && verified,
          absl::StrCat("moves=", parts->moves, " verified=", verified)};
}

// ---------------------------------------------------------------- 3
Outcome ThreeSizeTrapRegression() {
  const auto inst = testing::ThreeSizeTrap();
  const ConstraintReport r =
      CheckConstraints(inst.counts, inst.spec, inst.setting);
  const bool flow = FlowFeasible(inst.counts, inst.spec, inst.setting);
  return {r.ok() && !flow,
          absl::StrCat("constraints=", r.ok(), " flow_feasible=", flow)};
}

// ------------------------------------------------------------- 4 and 5
struct SmallInstances {
  std::vector<testing::RandomInstance> instances;
  std::vector<std::optional<int64_t>> brute;
};

SmallInstances MakeSmallInstances() {
  SmallInstances out;
  Rng rng(20260101);
  for (int trial = 0; trial < 240; ++trial) {
    out.instances.push_back(
        testing::MakeRandomInstance(rng, 60, 8, trial % 5 == 0));
  }
  return out;
}

SearchConfig SmallRange() {
  SearchConfig c;
  c.min_size = 1;
  c.max_size = 10;
  return c;
}

Outcome Optimality(SmallInstances& small) {
  const auto start = Clock::now();
  int discrepancies = 0;
  int feasible = 0;
  for (const auto& inst : small.instances) {
    auto brute = BruteForceOptimal(inst.counts, inst.spec, SmallRange(), 2);
    if (!brute.ok()) {
      return {false, absl::StrCat("brute force refused: ",
                                  brute.status().message())};
    }
    std::optional<int64_t> want;
    if (brute->has_value()) want = (*brute)->loss;
    small.brute.push_back(want);
    const auto got = TwoSizeBucketing(inst.counts, inst.spec, SmallRange());
    const std::optional<int64_t> got_loss =
        got.has_value() ? std::optional<int64_t>(got->loss) : std::nullopt;
    if (got_loss != want) ++discrepancies;
    if (got.has_value()) {
      ++feasible;
      if (!FlowFeasible(inst.counts, inst.spec, got->setting)) ++discrepancies;
    }
  }
  const double secs = SecondsSince(start);
  return {discrepancies == 0 && secs < 60.0 && small.instances.size() >= 200,
          absl::StrCat("instances=", small.instances.size(),
                       " feasible=", feasible, " discrepancies=",
                       discrepancies, " seconds=", secs)};
}

Outcome PruningSoundness(const SmallInstances& small) {
  int mismatches = 0;
  for (size_t k = 0; k < small.instances.size(); ++k) {
    const auto& inst = small.instances[k];
    for (Pruning mode : {Pruning::kFull, Pruning::kLossOnly, Pruning::kNone}) {
      TwoSizeOptions options;
      options.pruning = mode;
      const auto r =
          TwoSizeBucketing(inst.counts, inst.spec, SmallRange(), options);
      const std::optional<int64_t> loss =
          r.has_value() ? std::optional<int64_t>(r->loss) : std::nullopt;
      if (loss != small.brute[k]) ++mismatches;
    }
  }
  // Long lists: Zipf histograms big enough that some list has k >= 50.
  int long_instances = 0;
  int not_fewer = 0;
  for (int64_t n : {3000, 10007, 40000}) {
    for (double theta : {2.0, 8.0, 32.0}) {
      auto counts = ZipfCounts(n, 20, 1.0, 2.0);
      if (!counts.ok()) return {false, "zipf counts failed"};
      const PrivacySpec p =
          *LinearPrivacySpec(SaHistogram(*counts), theta, 0.02);
      auto config = SearchConfig::ForSpec(p, std::nullopt, 30);
      if (!config.ok()) return {false, "config failed"};
      TwoSizeOptions full;
      full.record_trace = true;
      TwoSizeOptions none;
      none.pruning = Pruning::kNone;
      SearchStats sf;
      SearchStats sn;
      const auto rf = TwoSizeBucketing(*counts, p, *config, full, &sf);
      const auto rn = TwoSizeBucketing(*counts, p, *config, none, &sn);
      if (!rf.has_value() || !rn.has_value() || rf->loss != rn->loss) {
        ++mismatches;
        continue;
      }
      int64_t longest = 0;
      for (const SizePairTrace& e : rf->trace) {
        longest = std::max(longest, e.list_length);
      }
      if (longest < 50) continue;
      ++long_instances;
      if (sf.evaluations >= sn.evaluations) ++not_fewer;
    }
  }
  return {mismatches == 0 && long_instances > 0 && not_fewer == 0,
          absl::StrCat("mode_mismatches=", mismatches,
                       " long_instances=", long_instances,
                       " full_not_fewer=", not_fewer)};
}

// ---------------------------------------------------------------- 6
struct ChainLosses {
  std::optional<int64_t> anatomy;
  std::optional<int64_t> one;
  std::optional<int64_t> two;
  std::optional<int64_t> multi;
};

ChainLosses ComputeChain(const MicrodataTable& t, const PrivacySpec& p,
                         const SearchConfig& config) {
  ChainLosses c;
  const SaHistogram h = Histogram(t);
  auto anatomy = AnatomyBaselineLoss(t.size(), EllForSpec(p));
  if (anatomy.ok()) c.anatomy = *anatomy;
  if (auto r = OneSizeBucketing(h.counts(), p, config)) c.one = r->loss;
  if (auto r = TwoSizeBucketing(h.counts(), p, config)) c.two = r->loss;
  auto multi = MultiSizeBucketing(t, p, config);
  if (multi.ok()) c.multi = multi->loss;
  return c;
}

Outcome UtilityChain() {
  // Break counts per link: anatomy>=one, one>=two, two>=multi, anatomy>=two.
  int instances = 0;
  int breaks[4] = {0, 0, 0, 0};
  std::string first_break;
  auto check = [&](const ChainLosses& c, const std::string& label) {
    if (!c.anatomy || !c.one || !c.two || !c.multi) return;
    ++instances;
    const bool links[4] = {*c.anatomy >= *c.one, *c.one >= *c.two,
                           *c.two >= *c.multi, *c.anatomy >= *c.two};
    for (int k = 0; k < 4; ++k) breaks[k] += links[k] ? 0 : 1;
    if (first_break.empty() && !(links[0] && links[1] && links[2])) {
      first_break = absl::StrCat(label, " anatomy=", *c.anatomy, " one=",
                                 *c.one, " two=", *c.two, " multi=", *c.multi);
    }
  };

  // MSE over the five privacy levels on a skewed synthetic table.
  const ZipfProfile profile = *FitZipfProfile(50, 0.0018, 0.075);
  SyntheticConfig sc;
  sc.n = 20000;
  sc.m = 50;
  sc.zipf_exponent = profile.exponent;
  sc.zipf_shift = profile.shift;
  sc.seed = 6;
  const MicrodataTable zipf = *GenSynthetic(sc);
  std::vector<double> mse;
  for (double theta : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    const PrivacySpec p = *LinearPrivacySpec(Histogram(zipf), theta, 0.02);
    const SearchConfig config = *SearchConfig::ForSpec(p, std::nullopt, 50);
    const ChainLosses c = ComputeChain(zipf, p, config);
    check(c, absl::StrCat("zipf theta=", theta));
    if (c.two) mse.push_back(*MseOf(*c.two, zipf.size()));
  }
  bool decreasing = mse.size() == 5;
  for (size_t i = 1; decreasing && i < mse.size(); ++i) {
    decreasing = mse[i] < mse[i - 1];
  }

  // Further synthetic tables across skew and size.
  for (int64_t n : {2000, 7919, 30000}) {
    for (double exponent : {0.5, 1.0, 1.5}) {
      for (double theta : {2.0, 8.0}) {
        SyntheticConfig cfg;
        cfg.n = n;
        cfg.m = 30;
        cfg.zipf_exponent = exponent;
        cfg.zipf_shift = 1.0;
        cfg.seed = static_cast<uint64_t>(n);
        const MicrodataTable t = *GenSynthetic(cfg);
        const PrivacySpec p = *LinearPrivacySpec(Histogram(t), theta, 0.02);
        const SearchConfig config = *SearchConfig::ForSpec(p, std::nullopt, 50);
        check(ComputeChain(t, p, config),
              absl::StrCat("n=", n, " s=", exponent, " theta=", theta));
      }
    }
  }

  // Small random instances.
  Rng rng(606);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = testing::MakeRandomInstance(rng, 60, 8, false);
    const MicrodataTable t = testing::TableFromCounts(inst.counts);
    check(ComputeChain(t, inst.spec, SmallRange()),
          absl::StrCat("random #", trial));
  }

  std::string mse_text;
  for (double v : mse) absl::StrAppend(&mse_text, mse_text.empty() ? "" : ",", v);
  const bool chain = breaks[0] == 0 && breaks[1] == 0 && breaks[2] == 0;
  return {chain && decreasing && instances > 0,
          absl::StrCat("instances=", instances, " breaks anatomy>=one=",
                       breaks[0], " one>=two=", breaks[1], " two>=multi=",
                       breaks[2], " anatomy>=two=", breaks[3],
                       first_break.empty() ? "" : " first: ", first_break,
                       " mse_decreasing=", decreasing, " mse=[", mse_text,
                       "]")};
}

// ---------------------------------------------------------------- 7
Outcome DifferentialInference() {
  const auto start = Clock::now();
  const LaplaceMech m = *LaplaceMech::Create(0.1);
  auto near = InferenceExperiment(100, 50, m, 1'000'000, 7);
  auto far = InferenceExperiment(1000, 500, m, 1'000'000, 8);
  if (!near.ok() || !far.ok()) return {false, "experiment refused"};
  const double secs = SecondsSince(start);
  const bool ok = std::abs(near->mean - 0.51) <= 0.01 &&
                  std::abs(near->variance - 0.025) <= 0.1 * 0.025 &&
                  std::abs(far->mean - 0.5001) <= 0.002 && secs < 30.0;
  return {ok, absl::StrCat("x100 mean=", near->mean, " var=", near->variance,
                           " rejected=", near->rejected, " x1000 mean=",
                           far->mean, " seconds=", secs)};
}

// ---------------------------------------------------------------- 8
Outcome LaplaceMechanism() {
  bool ok = true;
  std::string detail;
  for (double eps : {0.1, 1.0}) {
    const LaplaceMech m = *LaplaceMech::Create(eps);
    const Moments mo = SampleNoiseMoments(m, 1'000'000, 42);
    const double rel = std::abs(mo.variance() - m.variance()) / m.variance();
    const double ratio = MaxDensityRatio(m, 50, -200, 300, 1000);
    ok = ok && rel <= 0.05 && ratio <= std::exp(eps) * (1 + 1e-12);
    absl::StrAppend(&detail, detail.empty() ? "" : " ", "eps=", eps,
                    " var_rel_err=", rel, " ratio/e^eps=",
                    ratio / std::exp(eps));
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 9
Outcome FakeInjectionDefense() {
  // Two buckets of five distinct values over a domain of ten.
  std::vector<CsvRow> rows;
  Assignment a;
  for (int g = 0; g < 2; ++g) {
    Bucket b{5, {}};
    for (int k = 0; k < 5; ++k) {
      b.records.push_back(static_cast<RecordId>(rows.size()));
      rows.push_back({absl::StrCat("z", k % 3), absl::StrCat("x", g * 5 + k)});
    }
    a.buckets.push_back(std::move(b));
  }
  const MicrodataTable t = *MicrodataTable::FromRows({"q", "s"}, rows, "s");
  const PublishedTables base = Publish(t, a, 3);
  auto faked = InjectFakes(base, 2, 11);
  if (!faked.ok()) return {false, std::string(faked.status().message())};
  std::vector<CorruptedRecord> known;
  for (int k = 0; k < 4; ++k) known.push_back({0, t.record(k).sa});
  auto report = CorruptionAttackSim(*faked, known);
  if (!report.ok()) return {false, std::string(report.status().message())};
  const double certainty = report->buckets[0].real_certainty;

  // Enumerate which of the remaining values are the fakes.
  const int remaining = static_cast<int>(report->buckets[0].remaining);
  int placements = 0;
  int real_at_zero = 0;
  for (int mask = 0; mask < (1 << remaining); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != 2) continue;
    ++placements;
    if ((mask & 1) == 0) ++real_at_zero;
  }
  const double enumerated =
      placements > 0 ? static_cast<double>(real_at_zero) / placements : -1;

  // sigma = 0: publish a search result, write it, read it back, recheck.
  SyntheticConfig sc;
  sc.n = 3000;
  sc.m = 12;
  sc.seed = 9;
  const MicrodataTable table = *GenSynthetic(sc);
  const PrivacySpec p = *LinearPrivacySpec(Histogram(table), 4.0, 0.02);
  const auto best = TwoSizeBucketing(Histogram(table).counts(), p,
                                     *SearchConfig::ForSpec(p, std::nullopt, 50));
  if (!best.has_value()) return {false, "no setting for recheck table"};
  auto assignment = AssignTwoSize(table, AllRecords(table), p, best->setting);
  if (!assignment.ok()) return {false, "assignment failed"};
  const PublishedTables pt = Publish(table, *assignment, 5);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "fpriv_acceptance_publish";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  bool recheck_ok = false;
  if (WritePublished(pt, dir.string()).ok()) {
    auto back = ReadPublished(dir.string(), &table);
    recheck_ok = back.ok() && back->sigma == 0 && RecheckPrivacy(*back, p).ok();
  }
  std::filesystem::remove_all(dir);
  const bool ok = remaining == 3 && std::abs(certainty - 1.0 / 3.0) < 1e-15 &&
                  std::abs(enumerated - 1.0 / 3.0) < 1e-15 && recheck_ok;
  return {ok, absl::StrCat("certainty=", certainty, " enumerated=", enumerated,
                           " recheck_sigma0=", recheck_ok)};
}

// ---------------------------------------------------------------- 10
Outcome Scalability() {
  const ZipfProfile profile = *FitZipfProfile(50, 0.0018, 0.075);
  auto counts = ZipfCounts(500'000, 50, profile.exponent, profile.shift);
  if (!counts.ok()) return {false, "zipf counts failed"};
  const PrivacySpec p = *LinearPrivacySpec(SaHistogram(*counts), 8.0, 0.02);
  const SearchConfig config = *SearchConfig::ForSpec(p, std::nullopt, 50);
  const auto start = Clock::now();
  SearchStats stats;
  const auto r = TwoSizeBucketing(*counts, p, config, {}, &stats);
  const double secs = SecondsSince(start);
  return {r.has_value() && secs < 10.0,
          absl::StrCat("loss=", r.has_value() ? r->loss : -1,
                       " evaluations=", stats.evaluations, " seconds=", secs)};
}

int Run(const std::set<int>& known_failures) {
  SmallInstances small = MakeSmallInstances();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"gamma-list golden", GammaGolden},
      {"fifty-record end-to-end", FiftyRecordEndToEnd},
      {"three-size trap", ThreeSizeTrapRegression},
      {"two-size optimality", [&] { return Optimality(small); }},
      {"pruning soundness", [&] { return PruningSoundness(small); }},
      {"monotone utility chain", UtilityChain},
      {"differential inference", DifferentialInference},
      {"laplace mechanism", LaplaceMechanism},
      {"fake-injection defense", FakeInjectionDefense},
      {"scalability smoke", Scalability},
  };
  int unexpected = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const Outcome o = checks[i].second();
    const bool known = known_failures.count(id) > 0;
    if (o.pass == known) ++unexpected;
    std::printf("%s  criterion %d %s%s  (%s)\n", o.pass ? "PASS" : "FAIL", id,
                checks[i].first.c_str(), known ? " [known failure]" : "",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}

}  // namespace
}  // namespace fpriv

int main(int argc, char** argv) {
  std::set<int> known;
  constexpr std::string_view kFlag = "--known-failure=";
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    int id = 0;
    const std::string_view digits = arg.substr(std::min(kFlag.size(), arg.size()));
    const auto [end, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (arg.substr(0, kFlag.size()) != kFlag || ec != std::errc() ||
        end != digits.data() + digits.size()) {
      std::fprintf(stderr, "usage: %s [--known-failure=N]...\n", argv[0]);
      return 2;
    }
    known.insert(id);
  }
  return fpriv::Run(known);
}
