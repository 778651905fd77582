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

// fpriv: analyze, optimize, publish and evaluate bucketized releases.
//
// Exit codes: 0 ok, 2 privacy infeasible, 3 configuration error, 4 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "fpriv/dpsim.h"
#include "fpriv/metrics.h"
#include "fpriv/optimize.h"
#include "fpriv/privacy.h"
#include "fpriv/publish.h"
#include "fpriv/random.h"
#include "fpriv/synthetic.h"
#include "fpriv/table.h"
#include "fpriv/validate.h"
#include "nlohmann/json.hpp"

namespace fpriv {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

int ExitCodeFor(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kUnavailable:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

int Fail(const absl::Status& s) {
  std::cerr << "fpriv: " << s.message() << "\n";
  return ExitCodeFor(s);
}

int Infeasible(const std::string& why) {
  std::cerr << "fpriv: " << why << "\n";
  return kExitInfeasible;
}

void Emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

// Options shared by the table-driven commands.
struct TableOptions {
  std::string input;
  std::string sa;
  double theta = 8.0;
  double intercept = 0.02;
  std::string privacy_file;
  int64_t min_size = 0;  // 0: derive from the privacy spec
  int64_t max_size = 50;
  uint64_t seed = 1;
};

void AddTableOptions(CLI::App* cmd, TableOptions* o) {
  cmd->add_option("--input", o->input, "microdata CSV with a header row")
      ->required();
  cmd->add_option("--sa", o->sa, "sensitive attribute column")->required();
  cmd->add_option("--theta", o->theta, "privacy coefficient")
      ->capture_default_str();
  cmd->add_option("--intercept", o->intercept, "threshold intercept")
      ->capture_default_str();
  cmd->add_option("--privacy-file", o->privacy_file,
                  "per-value overrides, rows of value,threshold");
  cmd->add_option("--min-size", o->min_size,
                  "smallest bucket size (default: derived)");
  cmd->add_option("--max-size", o->max_size, "largest bucket size")
      ->capture_default_str();
  cmd->add_option("--seed", o->seed, "random seed")->capture_default_str();
}

struct Loaded {
  MicrodataTable table;
  SaHistogram hist;
  PrivacySpec spec;
};

absl::StatusOr<Loaded> Load(const TableOptions& o) {
  absl::StatusOr<MicrodataTable> table = IngestCsv(o.input, o.sa);
  if (!table.ok()) return table.status();
  SaHistogram hist = Histogram(*table);
  absl::StatusOr<PrivacySpec> spec =
      LinearPrivacySpec(hist, o.theta, o.intercept);
  if (!spec.ok()) return spec.status();
  if (!o.privacy_file.empty()) {
    spec = ApplyPrivacyFile(o.privacy_file, table->sa_dict(), *spec);
    if (!spec.ok()) return spec.status();
  }
  return Loaded{*std::move(table), std::move(hist), *std::move(spec)};
}

absl::StatusOr<SearchConfig> ConfigFor(const TableOptions& o,
                                       const PrivacySpec& spec) {
  std::optional<int64_t> min_size;
  if (o.min_size != 0) min_size = o.min_size;
  return SearchConfig::ForSpec(spec, min_size, o.max_size);
}

Json SettingJson(const BucketSetting& s) {
  Json groups = Json::array();
  for (const BucketGroup& g : s.groups()) {
    groups.push_back({{"size", g.size}, {"count", g.count}});
  }
  return groups;
}

// ------------------------------------------------------------ analyze

int RunAnalyze(const TableOptions& o) {
  absl::StatusOr<Loaded> l = Load(o);
  if (!l.ok()) return Fail(l.status());
  const bool eligible = CheckEligibility(l->hist, l->spec);
  Json values = Json::array();
  for (SaId i = 0; i < l->hist.domain_size(); ++i) {
    values.push_back({{"value", l->table.sa_dict().Lookup(i)},
                      {"count", l->hist.count(i)},
                      {"f", l->hist.freq(i)},
                      {"f_prime", l->spec.threshold(i)}});
  }
  Json out = {{"records", l->table.size()},
              {"domain_size", l->hist.domain_size()},
              {"eligible", eligible},
              {"ell", EllForSpec(l->spec)},
              {"default_min_size", DefaultMinSize(l->spec)},
              {"values", values}};
  Emit(out);
  return eligible ? kExitOk : kExitInfeasible;
}

// ----------------------------------------------------------- optimize

struct OptimizeOptions {
  std::string mode = "two";
  int max_sizes = 3;
  std::string out;
};

struct Optimized {
  BucketSetting setting;
  int64_t loss = 0;
  Json extra = Json::object();
  std::optional<MultiSizeResult> multi;
};

// Infeasible privacy comes back as FailedPrecondition with an "infeasible"
// prefix so callers can map it to its own exit code.
absl::Status InfeasibleStatus(const std::string& why) {
  return absl::FailedPreconditionError(absl::StrCat("infeasible: ", why));
}

bool IsInfeasible(const absl::Status& s) {
  return s.code() == absl::StatusCode::kFailedPrecondition &&
         s.message().substr(0, 11) == "infeasible:";
}

absl::StatusOr<Optimized> Optimize(const Loaded& l, const TableOptions& o,
                                   const std::string& mode, int max_sizes) {
  if (mode == "anatomy") {
    const int64_t ell = EllForSpec(l.spec);
    absl::StatusOr<BucketSetting> s = AnatomyBaselineSetting(l.table.size(), ell);
    if (!s.ok()) return s.status();
    Optimized r;
    r.setting = *s;
    r.loss = s->loss();
    // Sizes ell and ell + 1 only, so the two-size check is exact.
    absl::StatusOr<ConstraintReport> c =
        ValidateTwoSize(l.hist.counts(), l.spec, s->WithoutEmptyGroups());
    r.extra["ell"] = ell;
    r.extra["privacy_valid"] = c.ok() && c->ok();
    return r;
  }
  if (!CheckEligibility(l.hist, l.spec)) {
    return InfeasibleStatus("some value has f_i above its threshold");
  }
  absl::StatusOr<SearchConfig> config = ConfigFor(o, l.spec);
  if (!config.ok()) return config.status();
  const std::span<const int64_t> counts = l.hist.counts();
  auto from_search = [&](const std::optional<SearchResult>& s)
      -> absl::StatusOr<Optimized> {
    if (!s.has_value()) {
      return InfeasibleStatus(absl::StrCat("no valid setting with sizes in [",
                                           config->min_size, ", ",
                                           config->max_size, "]"));
    }
    Optimized r;
    r.setting = s->setting;
    r.loss = s->loss;
    r.extra["evaluations"] = s->stats.evaluations;
    r.extra["size_pairs"] = s->stats.size_pairs;
    return r;
  };
  if (mode == "two") {
    return from_search(TwoSizeBucketing(counts, l.spec, *config));
  }
  if (mode == "one") {
    return from_search(OneSizeBucketing(counts, l.spec, *config));
  }
  if (mode == "brute") {
    auto s = BruteForceOptimal(counts, l.spec, *config, max_sizes);
    if (!s.ok()) return s.status();
    return from_search(*s);
  }
  if (mode == "multi") {
    absl::StatusOr<MultiSizeResult> m = MultiSizeBucketing(l.table, l.spec, *config);
    if (!m.ok()) return m.status();
    Optimized r;
    r.setting = m->setting;
    r.loss = m->loss;
    r.extra["refinements"] = m->refinements.size();
    r.extra["leaves"] = m->leaves.size();
    r.multi = *std::move(m);
    return r;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mode '", mode, "'; expected two, one, multi, "
                   "brute or anatomy"));
}

int RunOptimize(const TableOptions& o, const OptimizeOptions& opt) {
  absl::StatusOr<Loaded> l = Load(o);
  if (!l.ok()) return Fail(l.status());
  absl::StatusOr<Optimized> r = Optimize(*l, o, opt.mode, opt.max_sizes);
  if (!r.ok()) {
    if (IsInfeasible(r.status())) return Infeasible(std::string(r.status().message()));
    return Fail(r.status());
  }
  absl::StatusOr<double> mse = MseOf(r->loss, l->table.size());
  Json out = {{"mode", opt.mode},
              {"records", l->table.size()},
              {"setting", SettingJson(r->setting)},
              {"loss", r->loss},
              {"mse", mse.ok() ? Json(*mse) : Json(nullptr)}};
  for (const auto& [k, v] : r->extra.items()) out[k] = v;
  if (!opt.out.empty()) {
    absl::Status w = WriteTextFile(opt.out, out.dump(2) + "\n");
    if (!w.ok()) return Fail(w);
  }
  Emit(out);
  return kExitOk;
}

// ------------------------------------------------------------ publish

struct PublishOptions {
  std::string mode = "two";
  int64_t sigma = 0;
  double neg_threshold = 0;
  std::string out;
};

int RunPublish(const TableOptions& o, const PublishOptions& p) {
  if (p.sigma < 0) return Fail(absl::InvalidArgumentError("--sigma must be >= 0"));
  if (p.mode != "two" && p.mode != "multi") {
    return Fail(absl::InvalidArgumentError("publish supports --mode two or multi"));
  }
  absl::StatusOr<Loaded> l = Load(o);
  if (!l.ok()) return Fail(l.status());
  absl::StatusOr<Optimized> r = Optimize(*l, o, p.mode, 0);
  if (!r.ok()) {
    if (IsInfeasible(r.status())) return Infeasible(std::string(r.status().message()));
    return Fail(r.status());
  }
  absl::StatusOr<Assignment> a =
      r->multi.has_value()
          ? AssignLeaves(l->table, r->multi->leaves)
          : AssignTwoSize(l->table, AllRecords(l->table), l->spec, r->setting);
  if (!a.ok()) return Fail(a.status());
  if (absl::Status v = VerifyAssignment(l->table, l->spec, *a); !v.ok()) {
    return Fail(v);
  }
  PublishedTables pt = Publish(l->table, *a, o.seed);
  int64_t flagged = 0;
  if (p.sigma > 0) {
    std::optional<NegAssociationModel> model;
    if (p.neg_threshold > 0) {
      model = LearnNegativeAssociations(pt, p.neg_threshold);
      flagged = static_cast<int64_t>(model->flagged().size());
    }
    absl::StatusOr<PublishedTables> faked = InjectFakes(
        pt, p.sigma, MixSeed(o.seed, 1), model ? &*model : nullptr);
    if (!faked.ok()) return Fail(faked.status());
    pt = *std::move(faked);
  }
  std::error_code ec;
  std::filesystem::create_directories(p.out, ec);
  if (ec) {
    return Fail(absl::PermissionDeniedError(
        absl::StrCat("cannot create '", p.out, "': ", ec.message())));
  }
  if (absl::Status w = WritePublished(pt, p.out); !w.ok()) return Fail(w);
  Json out = {{"mode", p.mode},
              {"out", p.out},
              {"buckets", pt.buckets.size()},
              {"records", pt.record_count()},
              {"st_rows", pt.st_row_count()},
              {"sigma", pt.sigma},
              {"flagged_pairs", flagged},
              {"setting", SettingJson(r->setting)},
              {"loss", r->loss}};
  Emit(out);
  return kExitOk;
}

// ----------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string published;
  int64_t pool = 5000;
  double selectivity = 0.01;
};

int RunEvaluate(const TableOptions& o, const EvaluateOptions& e) {
  absl::StatusOr<Loaded> l = Load(o);
  if (!l.ok()) return Fail(l.status());
  absl::StatusOr<PublishedTables> pt = ReadPublished(e.published, &l->table);
  if (!pt.ok()) return Fail(pt.status());
  if (pt->record_count() != l->table.size()) {
    return Fail(absl::InvalidArgumentError(absl::StrCat(
        "published tables hold ", pt->record_count(), " records, input has ",
        l->table.size())));
  }
  // Fakes can push a rare value above its threshold in the released ST. The
  // enforced check is on real records, which needs the audit file when
  // sigma > 0.
  const PrivacyRecheck as_published = RecheckPrivacy(*pt, l->spec);
  bool audited = pt->sigma == 0;
  for (const PublishedBucket& b : pt->buckets) audited |= !b.fakes.empty();
  const PrivacyRecheck real = RecheckRealRecords(*pt, l->spec);
  absl::StatusOr<std::vector<CountQuery>> pool =
      GenQueries(l->table.qi_domain_sizes(), l->table.sa_domain_size(), e.pool,
                 e.selectivity, o.seed);
  if (!pool.ok()) return Fail(pool.status());
  absl::StatusOr<UtilityReport> u = RelativeError(*pool, l->table, *pt);
  if (!u.ok()) return Fail(u.status());
  auto recheck_json = [&](const PrivacyRecheck& r) {
    Json violations = Json::array();
    for (const PrivacyViolation& v : r.violations) {
      violations.push_back({{"bid", v.bucket + 1},
                            {"value", l->table.sa_dict().Lookup(v.value)},
                            {"count", v.count},
                            {"bucket_size", v.bucket_size}});
    }
    return Json{{"ok", r.ok()}, {"violations", violations}};
  };
  const bool ok = audited ? real.ok() : as_published.ok();
  Json out = {{"records", l->table.size()},
              {"buckets", pt->buckets.size()},
              {"sigma", pt->sigma},
              {"loss", u->loss},
              {"mse", u->mse},
              {"re_mean", u->re_mean},
              {"query_count", u->query_count},
              {"excluded", u->excluded},
              {"selectivity", e.selectivity},
              {"privacy_recheck",
               {{"ok", ok},
                {"audited", audited},
                {"real_records", audited ? recheck_json(real) : Json(nullptr)},
                {"as_published", recheck_json(as_published)}}}};
  Emit(out);
  return ok ? kExitOk : kExitInfeasible;
}

// ------------------------------------------------------------- dpdemo

struct DpOptions {
  double epsilon = 0.1;
  double x = 100;
  double ratio = 0.5;
  int64_t samples = 1'000'000;
  int steps = 3;
  uint64_t seed = 1;
  int workers = 0;
  std::string out;
};

int RunDpDemo(const DpOptions& d) {
  absl::StatusOr<LaplaceMech> mech = LaplaceMech::Create(d.epsilon);
  if (!mech.ok()) return Fail(mech.status());
  if (d.steps < 1) return Fail(absl::InvalidArgumentError("--steps must be >= 1"));
  std::vector<double> xs;
  for (int i = 0; i < d.steps; ++i) xs.push_back(d.x * std::pow(10.0, i));
  auto sweep = ConvergenceSweep(d.ratio, *mech, xs, d.samples, d.seed, d.workers);
  if (!sweep.ok()) return Fail(sweep.status());
  std::string csv =
      "x,y,predicted_mean,empirical_mean,predicted_variance,"
      "empirical_variance,rejected\n";
  for (const InferenceEstimate& e : *sweep) {
    absl::StrAppend(&csv, e.x, ",", e.y, ",", e.predicted_mean, ",", e.mean,
                    ",", e.predicted_variance, ",", e.variance, ",",
                    e.rejected, "\n");
  }
  if (!d.out.empty()) {
    if (absl::Status w = WriteTextFile(d.out, csv); !w.ok()) return Fail(w);
  }
  std::cout << csv;
  return kExitOk;
}

// -------------------------------------------------------------- synth

struct SynthOptions {
  SyntheticConfig config;
  double fit_min = 0;
  double fit_max = 0;
  std::string out;
};

int RunSynth(SynthOptions s) {
  if (s.fit_min > 0 || s.fit_max > 0) {
    absl::StatusOr<ZipfProfile> p =
        FitZipfProfile(s.config.m, s.fit_min, s.fit_max);
    if (!p.ok()) return Fail(p.status());
    s.config.zipf_exponent = p->exponent;
    s.config.zipf_shift = p->shift;
  }
  absl::StatusOr<MicrodataTable> t = GenSynthetic(s.config);
  if (!t.ok()) return Fail(t.status());
  if (absl::Status w = WriteTextFile(s.out, TableToCsv(*t)); !w.ok()) {
    return Fail(w);
  }
  const SaHistogram h = Histogram(*t);
  double fmin = 1;
  double fmax = 0;
  for (SaId i = 0; i < h.domain_size(); ++i) {
    fmin = std::min(fmin, h.freq(i));
    fmax = std::max(fmax, h.freq(i));
  }
  Emit({{"out", s.out},
        {"records", t->size()},
        {"domain_size", h.domain_size()},
        {"zipf_exponent", s.config.zipf_exponent},
        {"zipf_shift", s.config.zipf_shift},
        {"min_f", fmin},
        {"max_f", fmax},
        {"sa", t->sa_name()}});
  return kExitOk;
}

// -------------------------------------------------------------- sweep

struct SweepOptions {
  std::vector<double> thetas = {2, 4, 8, 16, 32};
  std::string out;
};

int RunSweep(TableOptions o, const SweepOptions& s) {
  std::string csv = "theta,ell,anatomy_mse,one_mse,two_mse,multi_mse\n";
  for (double theta : s.thetas) {
    o.theta = theta;
    absl::StatusOr<Loaded> l = Load(o);
    if (!l.ok()) return Fail(l.status());
    absl::StrAppend(&csv, theta, ",", EllForSpec(l->spec));
    for (const char* mode : {"anatomy", "one", "two", "multi"}) {
      absl::StatusOr<Optimized> r = Optimize(*l, o, mode, 0);
      absl::StrAppend(&csv, ",");
      if (r.ok()) {
        absl::StrAppend(&csv, *MseOf(r->loss, l->table.size()));
      } else if (!IsInfeasible(r.status())) {
        return Fail(r.status());
      }
    }
    absl::StrAppend(&csv, "\n");
  }
  if (!s.out.empty()) {
    if (absl::Status w = WriteTextFile(s.out, csv); !w.ok()) return Fail(w);
  }
  std::cout << csv;
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Bucketized publishing under per-value privacy thresholds"};
  app.require_subcommand(1);

  TableOptions table;
  OptimizeOptions optimize;
  PublishOptions publish;
  EvaluateOptions evaluate;
  DpOptions dp;
  SynthOptions synth;
  SweepOptions sweep;

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "histogram, thresholds and eligibility");
  AddTableOptions(analyze_cmd, &table);

  CLI::App* optimize_cmd =
      app.add_subcommand("optimize", "search a bucket setting");
  AddTableOptions(optimize_cmd, &table);
  optimize_cmd
      ->add_option("--mode", optimize.mode, "two, one, multi, brute or anatomy")
      ->capture_default_str();
  optimize_cmd
      ->add_option("--max-sizes", optimize.max_sizes,
                   "distinct sizes allowed in brute mode")
      ->capture_default_str();
  optimize_cmd->add_option("--out", optimize.out, "also write the JSON here");

  CLI::App* publish_cmd =
      app.add_subcommand("publish", "write qit.csv, st.csv, fakes_audit.json");
  AddTableOptions(publish_cmd, &table);
  publish_cmd->add_option("--mode", publish.mode, "two or multi")
      ->capture_default_str();
  publish_cmd->add_option("--sigma", publish.sigma, "fake values per bucket")
      ->capture_default_str();
  publish_cmd
      ->add_option("--neg-threshold", publish.neg_threshold,
                   "avoid fakes flagged below this observed/expected ratio")
      ->capture_default_str();
  publish_cmd->add_option("--out", publish.out, "output directory")->required();

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "recheck privacy and measure query error");
  AddTableOptions(evaluate_cmd, &table);
  evaluate_cmd
      ->add_option("--published,--out", evaluate.published,
                   "directory written by publish")
      ->required();
  evaluate_cmd->add_option("--pool", evaluate.pool, "number of queries")
      ->capture_default_str();
  evaluate_cmd->add_option("--selectivity", evaluate.selectivity,
                           "expected query selectivity")
      ->capture_default_str();

  CLI::App* dp_cmd =
      app.add_subcommand("dpdemo", "noisy-ratio inference under Laplace noise");
  dp_cmd->add_option("--epsilon", dp.epsilon)->capture_default_str();
  dp_cmd->add_option("--x", dp.x, "first denominator count")
      ->capture_default_str();
  dp_cmd->add_option("--ratio", dp.ratio, "y / x")->capture_default_str();
  dp_cmd->add_option("--samples", dp.samples)->capture_default_str();
  dp_cmd->add_option("--steps", dp.steps, "x grows tenfold per step")
      ->capture_default_str();
  dp_cmd->add_option("--seed", dp.seed)->capture_default_str();
  dp_cmd->add_option("--workers", dp.workers, "0 picks hardware concurrency")
      ->capture_default_str();
  dp_cmd->add_option("--out", dp.out, "also write the CSV here");

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a Zipf table");
  synth_cmd->add_option("--rows", synth.config.n)->capture_default_str();
  synth_cmd->add_option("--values", synth.config.m)->capture_default_str();
  synth_cmd->add_option("--zipf", synth.config.zipf_exponent)
      ->capture_default_str();
  synth_cmd->add_option("--zipf-shift", synth.config.zipf_shift)
      ->capture_default_str();
  synth_cmd->add_option("--fit-min", synth.fit_min,
                        "fit the shape to this smallest frequency");
  synth_cmd->add_option("--fit-max", synth.fit_max,
                        "fit the shape to this largest frequency");
  synth_cmd->add_option("--qi-domains", synth.config.qi_domains)
      ->delimiter(',')
      ->capture_default_str();
  synth_cmd->add_option("--correlation", synth.config.correlation)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "CSV path")->required();

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "MSE per method over privacy coefficients");
  AddTableOptions(sweep_cmd, &table);
  sweep_cmd->add_option("--thetas", sweep.thetas)->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "also write the CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (analyze_cmd->parsed()) return RunAnalyze(table);
  if (optimize_cmd->parsed()) return RunOptimize(table, optimize);
  if (publish_cmd->parsed()) return RunPublish(table, publish);
  if (evaluate_cmd->parsed()) return RunEvaluate(table, evaluate);
  if (dp_cmd->parsed()) return RunDpDemo(dp);
  if (synth_cmd->parsed()) return RunSynth(synth);
  if (sweep_cmd->parsed()) return RunSweep(table, sweep);
  return kExitConfig;
}

}  // namespace
}  // namespace fpriv

int main(int argc, char** argv) { return fpriv::Main(argc, argv); }
