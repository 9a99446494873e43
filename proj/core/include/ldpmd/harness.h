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


// Monte Carlo experiment harness: populations, behaviors, perturbation,
// estimation and AE/Var metrics over repeated trials, with deterministic CSV
// output. All randomness derives from ExperimentConfig::seed; see docs/rng.md
// for the stream layout.

#ifndef LDPMD_HARNESS_H_
#define LDPMD_HARNESS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpmd/audit.h"
#include "ldpmd/population.h"

namespace ldpmd {

enum class DatasetKind { kGauss, kExp, kUniform, kFile };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kGauss;
  double mu = 0.5;      // gauss
  double sigma = 0.1;   // gauss
  double scale = 0.1;   // exp
  std::string path;     // file
  std::string column;   // file: header name, or index without a header
  ColumnOptions column_options;

  // "gauss", "exp", "uniform", or the file's stem.
  std::string Name() const;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  // Population sizes; ignored for file datasets, which use every row.
  std::vector<uint64_t> sizes = {100000};
  std::vector<double> epsilons;
  std::vector<Mechanism> mechanisms;
  // Forcing mechanisms (Harmony, PM, BiSample) run once per top/rnd entry;
  // null-aware mechanisms always run with the null behavior.
  std::vector<BehaviorMode> behaviors = {BehaviorMode::kNullValue};
  // Gaussian preference model, used unless missing_rates is non-empty.
  double preference_mu = 5.0;
  double preference_sigma = 1.5;
  // Forced missing-rate sweep. Each entry replaces the preference model.
  std::vector<double> missing_rates;
  int trials = 100;
  uint64_t seed = 0;
  // Reuse trial 0's population in every trial.
  bool fixed_population = false;
  // 0 means std::thread::hardware_concurrency().
  int threads = 0;
  int privkvm_virtual_iterations = 5;
  std::string output;
  std::string trials_output;
};

// ConfigError (kInvalidArgument) for unknown or ill-typed keys and for any
// violation reported by ValidateConfig.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view json);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// ConfigError when trials < 1, a sweep list is empty, an epsilon or rate is
// out of range, RR is requested, or a behavior has no mechanism to run with.
absl::Status ValidateConfig(const ExperimentConfig& config);

struct Arm {
  Mechanism mechanism = Mechanism::kBiSampleMd;
  BehaviorMode behavior = BehaviorMode::kNullValue;

  friend bool operator==(const Arm&, const Arm&) = default;
};

// Every (mechanism, behavior) pair the config runs, in config order.
std::vector<Arm> ExpandArms(const ExperimentConfig& config);

struct SweepPoint {
  double epsilon = 1.0;
  uint64_t n = 0;
  std::optional<double> missing_rate;
};

std::vector<SweepPoint> ExpandSweep(const ExperimentConfig& config);

struct TrialResult {
  Arm arm;
  std::string dataset;
  SweepPoint point;
  int trial_index = 0;
  // Forcing mechanisms target the whole population's mean, null-aware ones
  // the responders' mean; absent when nobody responds.
  std::optional<double> m_true;
  std::optional<double> m_est;
  double mr_true = 0.0;
  // Null-aware mechanisms only.
  std::optional<double> mr_est;
  // "ok", or the tag of the estimator error (e.g. AllNullPopulation).
  std::string status = "ok";
};

struct MetricRow {
  Arm arm;
  std::string dataset;
  SweepPoint point;
  int trials = 0;
  int failures = 0;
  // Mean absolute and mean squared error over successful trials, computed on
  // raw estimates. Absent when no trial produced the estimate.
  std::optional<double> ae_m;
  std::optional<double> var_m;
  std::optional<double> ae_mr;
  std::optional<double> var_mr;
  // "ok", "partial" or "failed".
  std::string status = "ok";
  // Tag of the first failure, empty when none.
  std::string error;
};

// One trial of one arm. Population and behavior draws depend only on
// (seed, trial_index) and the sweep point, so every arm of a trial sees the
// same users. Estimator failures are recorded in the result, not returned.
absl::StatusOr<TrialResult> RunTrial(const ExperimentConfig& config,
                                     const Arm& arm, const SweepPoint& point,
                                     int trial_index);

struct ExperimentResult {
  // Sorted by (mechanism, behavior, epsilon, n, missing rate).
  std::vector<MetricRow> metrics;
  // Same order, then trial index.
  std::vector<TrialResult> trials;
};

// Output is independent of the thread count.
absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config);

// Metrics from trials of a single (arm, point).
MetricRow SummarizeTrials(const std::vector<TrialResult>& trials);

std::string MetricsCsvHeader();
std::string TrialsCsvHeader();
std::string FormatMetricsCsv(const std::vector<MetricRow>& rows);
std::string FormatTrialsCsv(const std::vector<TrialResult>& trials);
// IoError (kUnavailable) when the file cannot be written.
absl::Status WriteMetricsCsv(const std::vector<MetricRow>& rows,
                             const std::string& path);
absl::Status WriteTrialsCsv(const std::vector<TrialResult>& trials,
                            const std::string& path);

// Built-in sweeps. Defaults: eps in {0.1, 0.5, 1, 2, 4, 6, 8}, missing rate
// 0.1..0.9, n in {1e3, 1e4, 1e5}.
struct NamedConfig {
  std::string file_name;
  ExperimentConfig config;
};
std::vector<NamedConfig> ReproductionConfigs(uint64_t seed);

// Empirical truth rate of Gaussian(mu, sigma) preferences against the
// Gaussian upper tail, one row per epsilon:
// "epsilon,truth_rate,gaussian_tail".
std::string TruthRateCsv(double mu, double sigma, uint64_t n,
                         const std::vector<double>& epsilons, uint64_t seed);

struct ReproduceOptions {
  std::string out_dir = ".";
  uint64_t seed = 1;
  // 0 keeps each config's value. n overrides single-size sweeps only.
  int trials = 0;
  uint64_t n = 0;
  int threads = 0;
};

// Writes truth_rate.csv and one metrics CSV per built-in config, logging
// progress to `log` when non-null.
absl::Status RunReproduction(const ReproduceOptions& options,
                             std::ostream* log);

}  // namespace ldpmd

#endif  // LDPMD_HARNESS_H_
