// Copyright 2026 The ldpmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Every stochastic check derives from kMasterSeed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "cli.h"
#include "ldpmd/audit.h"
#include "ldpmd/csv.h"
#include "ldpmd/estimation.h"
#include "ldpmd/harness.h"
#include "ldpmd/mechanisms.h"
#include "ldpmd/population.h"
#include "ldpmd/random.h"

namespace ldpmd {
namespace {

constexpr uint64_t kMasterSeed = 20200924;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Fail(const absl::Status& status) {
  return {false, absl::StrCat("error: ", status.ToString())};
}

std::string Num(double v) { return FormatDouble(v); }

PrivacyBudget Budget(double eps) { return *PrivacyBudget::Create(eps); }

// C = (e^eps + 1) / (e^eps - 1), computed directly.
double ScaleC(double eps) { return (std::exp(eps) + 1) / (std::exp(eps) - 1); }

// Criterion 1: analytic audit equals the claimed budget.
Outcome AuditExact() {
  const std::vector<double> epsilons = {0.1, 0.5, 1, 2, std::log(3.0)};
  const std::vector<Mechanism> mechanisms = {
      Mechanism::kBiSample, Mechanism::kBiSampleMd,
      Mechanism::kRandomizedResponse, Mechanism::kHarmony};
  double worst = 0.0;
  std::string where;
  for (Mechanism m : mechanisms) {
    const std::vector<PreparedValue> grid = DefaultAuditGrid(m, 201);
    for (double eps : epsilons) {
      absl::StatusOr<ChannelMatrix> matrix =
          ComputeChannelMatrix(m, Budget(eps), grid);
      if (!matrix.ok()) return Fail(matrix.status());
      absl::StatusOr<AuditReport> report = AuditEpsilon(*matrix);
      if (!report.ok()) return Fail(report.status());
      const double gap = std::fabs(report->epsilon_observed - eps);
      if (gap >= worst) {
        worst = gap;
        where = absl::StrCat(MechanismName(m), " eps=", Num(eps));
      }
    }
  }
  return {worst <= 1e-9,
          absl::StrCat("max |eps_observed - eps| = ", Num(worst), " (", where,
                       ")")};
}

// Criterion 2: sampled output frequencies match the closed-form channel.
Outcome MonteCarloMatchesChannel() {
  const std::vector<Mechanism> mechanisms = {
      Mechanism::kRandomizedResponse, Mechanism::kHarmony,
      Mechanism::kPiecewise,          Mechanism::kBiSample,
      Mechanism::kBiSampleMd,         Mechanism::kPrivKvm};
  const uint64_t draws = 1000000;
  RandomStream seeds = RandomStream(kMasterSeed).Fork(2);
  double worst = 0.0;
  std::string where;
  for (Mechanism m : mechanisms) {
    std::vector<PreparedValue> inputs;
    if (m == Mechanism::kRandomizedResponse) {
      inputs = {*PreparedValue::Real(0.0), *PreparedValue::Real(1.0)};
    } else {
      for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        inputs.push_back(*PreparedValue::Real(v));
      }
      if (IsNullAware(m)) inputs.push_back(PreparedValue::Null());
    }
    for (double eps : {0.5, 1.0, 2.0}) {
      absl::StatusOr<ChannelMatrix> matrix =
          ComputeChannelMatrix(m, Budget(eps), inputs);
      if (!matrix.ok()) return Fail(matrix.status());
      for (size_t i = 0; i < inputs.size(); ++i) {
        absl::StatusOr<std::vector<double>> freq = MonteCarloChannel(
            m, Budget(eps), inputs[i], draws, seeds.NextU64());
        if (!freq.ok()) return Fail(freq.status());
        for (size_t j = 0; j < freq->size(); ++j) {
          const double gap = std::fabs((*freq)[j] - matrix->probs[i][j]);
          if (gap > worst) {
            worst = gap;
            where = absl::StrCat(MechanismName(m), " eps=", Num(eps),
                                 " input=", matrix->InputLabel(i),
                                 " output=", matrix->outputs[j]);
          }
        }
      }
    }
  }
  return {worst <= 0.002,
          absl::StrCat("max cell gap = ", Num(worst), " (", where, ")")};
}

// Criterion 3: expected counts reproduce ground truth exactly.
Outcome OracleUnbiased() {
  RandomStream gen = RandomStream(kMasterSeed).Fork(3);
  double worst = 0.0;
  int with_nulls = 0;
  for (int iter = 0; iter < 50; ++iter) {
    const double eps = gen.Uniform(0.1, 4.0);
    std::vector<PreparedValue> population;
    double sum = 0.0;
    int responders = 0;
    for (int i = 0; i < 10; ++i) {
      if (gen.Bernoulli(0.3)) {
        population.push_back(PreparedValue::Null());
      } else {
        const double v = gen.Uniform(-1.0, 1.0);
        population.push_back(*PreparedValue::Real(v));
        sum += v;
        ++responders;
      }
    }
    if (responders < 10) ++with_nulls;
    absl::StatusOr<ExpectedCounts> counts =
        ExpectedCountsOracle(population, Budget(eps));
    if (!counts.ok()) return Fail(counts.status());
    absl::StatusOr<DirectionFrequencies> f = Frequencies(*counts);
    if (!f.ok()) return Fail(f.status());
    auto rel = [](double actual, double expected) {
      return std::fabs(actual - expected) / std::max(1.0, std::fabs(expected));
    };
    const PrivacyBudget b = Budget(eps);
    worst = std::max(worst, rel(SumEstimate(*f, b), sum));
    worst = std::max(worst, rel(MeanEstimateBasic(*f, b), sum / 10.0));
    worst = std::max(worst,
                     rel(MissingRateEstimate(*f, b), (10 - responders) / 10.0));
    if (responders > 0) {
      absl::StatusOr<double> m = MeanEstimateMd(*f, b);
      if (!m.ok()) return Fail(m.status());
      worst = std::max(worst, rel(*m, sum / responders));
    }
  }
  return {worst <= 1e-10 && with_nulls > 0,
          absl::StrCat("max relative error = ", Num(worst), " over 50 "
                       "populations (", with_nulls, " with nulls)")};
}

// Criterion 4: n Var[m*] between (C^2 - m^2) 0.9 and C^2 1.1.
Outcome VarianceBound() {
  const PrivacyBudget b = Budget(1.0);
  const size_t n = 10000;
  const int trials = 1000;
  RandomStream root = RandomStream(kMasterSeed).Fork(4);
  const std::vector<double> values = GenGauss(n, 0.5, 0.1, root.Fork(0));
  double m = 0.0;
  for (double v : values) m += v;
  m /= n;
  std::vector<double> estimates;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng = root.Fork(1).Fork(t);
    DirectionCounts counts;
    for (double v : values) {
      absl::StatusOr<PerturbedReport> r = BiSamplePerturb(v, b, rng);
      if (!r.ok()) return Fail(r.status());
      counts.Add(*r);
    }
    absl::StatusOr<double> est = MeanEstimateBasic(counts, b);
    if (!est.ok()) return Fail(est.status());
    estimates.push_back(*est);
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= trials;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= trials - 1;
  const double c2 = ScaleC(1.0) * ScaleC(1.0);
  const double scaled = n * var;
  const double lo = (c2 - m * m) * 0.9;
  const double hi = c2 * 1.1;
  return {scaled >= lo && scaled <= hi,
          absl::StrCat("n*Var = ", Num(scaled), ", bounds [", Num(lo), ", ",
                       Num(hi), "]")};
}

// Sample variance of m_est - m_true over the rows of one arm.
double ErrorVariance(const std::vector<TrialResult>& trials, Mechanism m) {
  std::vector<double> errors;
  for (const TrialResult& t : trials) {
    if (t.arm.mechanism == m && t.m_est && t.m_true) {
      errors.push_back(*t.m_est - *t.m_true);
    }
  }
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= errors.size();
  double var = 0.0;
  for (double e : errors) var += (e - mean) * (e - mean);
  return var / (errors.size() - 1);
}

ExperimentConfig BaseConfig() {
  ExperimentConfig c;
  c.dataset.kind = DatasetKind::kGauss;
  c.seed = kMasterSeed;
  c.threads = 0;
  return c;
}

// Criterion 5: BiSample and Harmony have the same variance.
Outcome HarmonyParity() {
  ExperimentConfig c = BaseConfig();
  c.sizes = {100000};
  c.epsilons = {1.0};
  c.mechanisms = {Mechanism::kBiSample, Mechanism::kHarmony};
  c.behaviors = {BehaviorMode::kTop};
  c.missing_rates = {0.0};
  c.trials = 200;
  absl::StatusOr<ExperimentResult> r = RunExperiment(c);
  if (!r.ok()) return Fail(r.status());
  const double bisample = ErrorVariance(r->trials, Mechanism::kBiSample);
  const double harmony = ErrorVariance(r->trials, Mechanism::kHarmony);
  const double rel = std::fabs(bisample - harmony) / harmony;
  return {rel <= 0.10,
          absl::StrCat("Var BiSample = ", Num(bisample), ", Var Harmony = ",
                       Num(harmony), ", relative gap = ", Num(rel))};
}

const MetricRow* FindRow(const std::vector<MetricRow>& rows, Mechanism m,
                         BehaviorMode b, double eps, uint64_t n,
                         std::optional<double> mr) {
  for (const MetricRow& row : rows) {
    if (row.arm.mechanism == m && row.arm.behavior == b &&
        row.point.epsilon == eps && row.point.n == n &&
        row.point.missing_rate == mr) {
      return &row;
    }
  }
  return nullptr;
}

// Criterion 6: missing-rate accuracy.
Outcome MissingRateAccuracy() {
  ExperimentConfig c = BaseConfig();
  c.sizes = {100000};
  c.epsilons = {1.0};
  c.mechanisms = {Mechanism::kBiSampleMd};
  c.behaviors = {BehaviorMode::kNullValue};
  c.missing_rates = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  c.trials = 100;
  absl::StatusOr<ExperimentResult> r = RunExperiment(c);
  if (!r.ok()) return Fail(r.status());
  bool pass = r->metrics.size() == c.missing_rates.size();
  double worst_mr = 0.0;
  std::string detail;
  for (const MetricRow& row : r->metrics) {
    if (!row.ae_mr || !row.ae_m) {
      pass = false;
      continue;
    }
    worst_mr = std::max(worst_mr, *row.ae_mr);
    const bool ok = *row.ae_mr <= 0.01 && *row.ae_mr < *row.ae_m;
    pass = pass && ok;
    absl::StrAppend(&detail, " mr=", Num(*row.point.missing_rate), ":",
                    Num(*row.ae_mr), "<", Num(*row.ae_m), ok ? "" : "(x)");
  }
  return {pass, absl::StrCat("max AE(mr) = ", Num(worst_mr),
                             "; AE(mr)<AE(m):", detail)};
}

// Criterion 7: AE(m) scales as 1/sqrt(n) and as C(eps).
Outcome ScalingLaw() {
  ExperimentConfig c = BaseConfig();
  c.sizes = {10000, 40000};
  c.epsilons = {0.5, 1.0};
  c.mechanisms = {Mechanism::kBiSample};
  c.behaviors = {BehaviorMode::kTop};
  c.missing_rates = {0.0};
  c.trials = 100;
  absl::StatusOr<ExperimentResult> r = RunExperiment(c);
  if (!r.ok()) return Fail(r.status());
  auto ae = [&](double eps, uint64_t n) -> double {
    const MetricRow* row = FindRow(r->metrics, Mechanism::kBiSample,
                                   BehaviorMode::kTop, eps, n, 0.0);
    return row && row->ae_m ? *row->ae_m : std::nan("");
  };
  const double by_n = ae(1.0, 10000) / ae(1.0, 40000);
  const double by_eps = ae(0.5, 10000) / ae(1.0, 10000);
  const bool pass =
      by_n >= 1.6 && by_n <= 2.6 && by_eps >= 1.6 && by_eps <= 2.6;
  return {pass, absl::StrCat("AE ratio n 1e4->4e4 = ", Num(by_n),
                             ", eps 1->0.5 = ", Num(by_eps))};
}

// Criterion 8: fake answers bias forcing mechanisms at high budgets.
Outcome FakeAnswerBias() {
  ExperimentConfig c = BaseConfig();
  c.sizes = {100000};
  c.epsilons = {8.0};
  c.mechanisms = {Mechanism::kHarmony, Mechanism::kBiSampleMd};
  c.behaviors = {BehaviorMode::kNullValue, BehaviorMode::kTop,
                 BehaviorMode::kRnd};
  c.trials = 100;
  absl::StatusOr<ExperimentResult> gauss = RunExperiment(c);
  if (!gauss.ok()) return Fail(gauss.status());
  c.dataset.kind = DatasetKind::kUniform;
  absl::StatusOr<ExperimentResult> uniform = RunExperiment(c);
  if (!uniform.ok()) return Fail(uniform.status());

  const MetricRow* top =
      FindRow(gauss->metrics, Mechanism::kHarmony, BehaviorMode::kTop, 8.0,
              100000, std::nullopt);
  const MetricRow* md =
      FindRow(gauss->metrics, Mechanism::kBiSampleMd, BehaviorMode::kNullValue,
              8.0, 100000, std::nullopt);
  const MetricRow* rnd_u =
      FindRow(uniform->metrics, Mechanism::kHarmony, BehaviorMode::kRnd, 8.0,
              100000, std::nullopt);
  const MetricRow* md_u =
      FindRow(uniform->metrics, Mechanism::kBiSampleMd,
              BehaviorMode::kNullValue, 8.0, 100000, std::nullopt);
  if (!top || !md || !rnd_u || !md_u || !top->ae_m || !md->ae_m ||
      !rnd_u->ae_m || !md_u->ae_m) {
    return {false, "missing metric rows"};
  }
  const bool pass = *top->ae_m > 0.3 && *md->ae_m < 0.05 &&
                    *rnd_u->ae_m <= 2.0 * *md_u->ae_m;
  return {pass,
          absl::StrCat("GAUSS: AE Harmony-TOP = ", Num(*top->ae_m),
                       ", AE BiSampleMD = ", Num(*md->ae_m),
                       "; UNIFORM: AE Harmony-RND = ", Num(*rnd_u->ae_m),
                       ", AE BiSampleMD = ", Num(*md_u->ae_m))};
}

// Criterion 9: BiSampleMD against the PrivKVM baseline.
Outcome BeatsPrivKvm() {
  ExperimentConfig c = BaseConfig();
  c.sizes = {100000};
  c.epsilons = {0.1, 1.0};
  c.mechanisms = {Mechanism::kBiSampleMd, Mechanism::kPrivKvm};
  c.behaviors = {BehaviorMode::kNullValue};
  c.missing_rates = {0.2, 0.5};
  c.trials = 100;
  absl::StatusOr<ExperimentResult> r = RunExperiment(c);
  if (!r.ok()) return Fail(r.status());
  bool pass = true;
  std::string detail;
  for (double eps : c.epsilons) {
    for (double mr : c.missing_rates) {
      const MetricRow* md = FindRow(r->metrics, Mechanism::kBiSampleMd,
                                    BehaviorMode::kNullValue, eps, 100000, mr);
      const MetricRow* kvm = FindRow(r->metrics, Mechanism::kPrivKvm,
                                     BehaviorMode::kNullValue, eps, 100000, mr);
      if (!md || !kvm || !md->ae_m || !kvm->ae_m || !md->ae_mr ||
          !kvm->ae_mr) {
        return {false, "missing metric rows"};
      }
      const bool m_ok = *md->ae_m <= *kvm->ae_m;
      const bool mr_ok = *md->ae_mr <= *kvm->ae_mr;
      pass = pass && m_ok && mr_ok;
      absl::StrAppend(&detail, " [eps=", Num(eps), " mr=", Num(mr), " AE(m) ",
                      Num(*md->ae_m), (m_ok ? "<=" : ">"), Num(*kvm->ae_m),
                      " AE(mr) ", Num(*md->ae_mr), (mr_ok ? "<=" : ">"),
                      Num(*kvm->ae_mr), "]");
    }
  }
  return {pass, absl::StrCat("BiSampleMD vs PrivKVM:", detail)};
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunCli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"ldpmd"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

// Same config as the golden-file unit test.
constexpr char kGoldenConfig[] = R"json({
  "dataset": {"name": "gauss", "mu": 0.5, "sigma": 0.1},
  "n": 2000,
  "epsilon": [0.5, 2],
  "mechanisms": ["BiSampleMD", "PrivKVM", "Harmony", "PM"],
  "behaviors": ["null", "top", "rnd"],
  "preferences": {"mu": 5, "sigma": 1.5},
  "trials": 5,
  "seed": 7
})json";

// Criterion 10: byte-identical CLI runs and the frozen golden file.
Outcome Reproducible() {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      absl::StrCat("ldpmd_acceptance_", kMasterSeed);
  std::filesystem::create_directories(dir);
  const std::string config = (dir / "config.json").string();
  if (absl::Status s = WriteFile(config, kGoldenConfig); !s.ok()) {
    return Fail(s);
  }
  const std::string a = (dir / "a.csv").string();
  const std::string b = (dir / "b.csv").string();
  const std::string golden = (dir / "golden.csv").string();
  const std::string seed = absl::StrCat(kMasterSeed);
  if (RunCli({"experiment", "--config", config, "--seed", seed, "-o", a}) !=
          0 ||
      RunCli({"experiment", "--config", config, "--seed", seed, "-o", b}) !=
          0 ||
      RunCli({"experiment", "--config", config, "--seed", "7", "-o",
              golden}) != 0) {
    return {false, "experiment subcommand failed"};
  }
  const std::string frozen =
      ReadAll(std::string(LDPMD_TESTDATA_DIR) + "/golden_metrics.csv");
  const bool same = !ReadAll(a).empty() && ReadAll(a) == ReadAll(b);
  const bool golden_ok = !frozen.empty() && ReadAll(golden) == frozen;
  std::filesystem::remove_all(dir);
  return {same && golden_ok,
          absl::StrCat("consecutive runs identical: ", same ? "yes" : "no",
                       "; golden file identical: ", golden_ok ? "yes" : "no")};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

int Main() {
  const std::vector<Criterion> criteria = {
      {1, "LDP audit exact", AuditExact},
      {2, "Monte Carlo matches channel", MonteCarloMatchesChannel},
      {3, "Unbiasedness oracle", OracleUnbiased},
      {4, "Variance bound", VarianceBound},
      {5, "Harmony parity", HarmonyParity},
      {6, "Missing-rate accuracy", MissingRateAccuracy},
      {7, "Scaling law", ScalingLaw},
      {8, "Fake-answer bias", FakeAnswerBias},
      {9, "BiSampleMD vs PrivKVM", BeatsPrivKvm},
      {10, "Reproducibility", Reproducible},
  };
  std::cout << "master seed " << kMasterSeed << "\n";
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = c.run();
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " ("
              << c.title << "): " << o.detail << " ["
              << absl::StrCat(std::round(secs * 10) / 10) << " s]"
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size()
            << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace ldpmd

int main() { return ldpmd::Main(); }
