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


#include "cli.h"

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "ldpmd/audit.h"
#include "ldpmd/csv.h"
#include "ldpmd/estimation.h"
#include "ldpmd/harness.h"
#include "ldpmd/mechanisms.h"
#include "ldpmd/population.h"
#include "ldpmd/privkvm.h"
#include "ldpmd/random.h"

namespace ldpmd::cli {

namespace {

absl::Status ConfigError(absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat("ConfigError: ", message));
}

// Writes to `path`, or to `out` when the path is empty or "-".
absl::Status Emit(const std::string& path, const std::string& content,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return absl::OkStatus();
  }
  return WriteFile(path, content);
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string dataset = "gauss";
  double mu = 0.5;
  double sigma = 0.1;
  double scale = 0.1;
  std::string path;
  std::string column;
  char delimiter = ',';
  bool no_header = false;
  uint64_t n = 100000;
  double pref_mu = 5.0;
  double pref_sigma = 1.5;
  std::optional<double> missing_rate;
  std::optional<double> epsilon;
  uint64_t seed = 0;
  std::string out;
};

absl::Status Generate(const GenerateArgs& a, std::ostream& out) {
  const RandomStream root(a.seed);
  std::vector<double> values;
  std::string provenance = absl::StrCat(a.dataset, " seed=", a.seed);
  if (a.dataset == "gauss") {
    values = GenGauss(a.n, a.mu, a.sigma, root.Fork(1));
  } else if (a.dataset == "exp") {
    values = GenExp(a.n, a.scale, root.Fork(1));
  } else if (a.dataset == "uniform") {
    values = GenUniform(a.n, root.Fork(1));
  } else if (a.dataset == "file") {
    if (a.path.empty() || a.column.empty()) {
      return ConfigError("--dataset file needs --path and --column");
    }
    absl::StatusOr<std::vector<double>> loaded = LoadNumericColumn(
        a.path, a.column, ColumnOptions{a.delimiter, !a.no_header});
    if (!loaded.ok()) return loaded.status();
    values = *std::move(loaded);
    provenance = absl::StrCat(a.path, ":", a.column);
  } else {
    return ConfigError(absl::StrCat("unknown dataset '", a.dataset, "'"));
  }
  const std::vector<double> prefs =
      GenPreferences(values.size(), a.pref_mu, a.pref_sigma, root.Fork(2));
  absl::StatusOr<Population> population =
      MakePopulation(values, prefs, provenance);
  if (!population.ok()) return population.status();
  if (a.missing_rate) {
    if (!a.epsilon) return ConfigError("--missing-rate needs --epsilon");
    absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(*a.epsilon);
    if (!budget.ok()) return ConfigError(budget.status().message());
    population =
        ForceMissingRate(*population, *a.missing_rate, *budget, root.Fork(3));
    if (!population.ok()) return ConfigError(population.status().message());
  }
  if (a.out.empty() || a.out == "-") {
    std::string content = "value,preference\n";
    for (const UserRecord& u : population->users()) {
      absl::StrAppend(&content, FormatDouble(u.value), ",",
                      FormatDouble(u.preference), "\n");
    }
    out << content;
    return absl::OkStatus();
  }
  return WritePopulation(*population, a.out);
}

// ---------------------------------------------------------------------------

struct PerturbArgs {
  std::string population;
  std::string mechanism = "BiSampleMD";
  double epsilon = 1.0;
  std::string behavior;
  uint64_t seed = 0;
  std::string out;
};

std::string ReportHeader(Mechanism m) {
  switch (m) {
    case Mechanism::kBiSample:
    case Mechanism::kBiSampleMd:
      return "direction,bit";
    case Mechanism::kPrivKvm:
      return "key,value";
    default:
      return "value";
  }
}

absl::Status Perturb(const PerturbArgs& a, std::ostream& out) {
  absl::StatusOr<Mechanism> mechanism = ParseMechanism(a.mechanism);
  if (!mechanism.ok()) return ConfigError(mechanism.status().message());
  if (*mechanism == Mechanism::kRandomizedResponse) {
    return ConfigError("perturb supports Harmony, PM, BiSample, BiSampleMD, "
                       "PrivKVM");
  }
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(a.epsilon);
  if (!budget.ok()) return ConfigError(budget.status().message());
  const bool null_aware = IsNullAware(*mechanism);
  std::string behavior_name = a.behavior;
  if (behavior_name.empty()) behavior_name = null_aware ? "null" : "top";
  absl::StatusOr<BehaviorMode> behavior = ParseBehavior(behavior_name);
  if (!behavior.ok()) return ConfigError(behavior.status().message());
  if (null_aware != (*behavior == BehaviorMode::kNullValue)) {
    return ConfigError(absl::StrCat(a.mechanism, " cannot run with behavior ",
                                    behavior_name));
  }
  absl::StatusOr<Population> population = ReadPopulation(a.population);
  if (!population.ok()) return population.status();

  absl::StatusOr<PrivKvmConfig> kvm = PrivKvmConfig::Create(*budget);
  if (!kvm.ok()) return kvm.status();
  RandomStream behavior_rng = RandomStream(a.seed).Fork(1);
  RandomStream rng = RandomStream(a.seed).Fork(2);
  std::string content = absl::StrCat(ReportHeader(*mechanism), "\n");
  for (const UserRecord& user : population->users()) {
    const PreparedValue pv = ApplyBehavior(user, *budget, *behavior,
                                           behavior_rng);
    switch (*mechanism) {
      case Mechanism::kHarmony:
      case Mechanism::kPiecewise: {
        absl::StatusOr<double> v =
            *mechanism == Mechanism::kHarmony
                ? HarmonyPerturb(pv.value(), *budget, rng)
                : PiecewisePerturb(pv.value(), *budget, rng);
        if (!v.ok()) return v.status();
        absl::StrAppend(&content, FormatDouble(*v), "\n");
        break;
      }
      case Mechanism::kBiSample:
      case Mechanism::kBiSampleMd: {
        PerturbedReport r;
        if (*mechanism == Mechanism::kBiSample) {
          absl::StatusOr<PerturbedReport> s =
              BiSamplePerturb(pv.value(), *budget, rng);
          if (!s.ok()) return s.status();
          r = *s;
        } else {
          r = BiSampleMdPerturb(pv, *budget, rng);
        }
        absl::StrAppend(&content, static_cast<int>(r.direction), ",",
                        r.sample ? 1 : 0, "\n");
        break;
      }
      case Mechanism::kPrivKvm: {
        absl::StatusOr<KvPair> kv = PrivKvmPerturb(KvEncode(pv), *kvm, rng);
        if (!kv.ok()) return kv.status();
        absl::StrAppend(&content, kv->key ? 1 : 0, ",",
                        kv->key ? static_cast<int>(kv->value) : 0, "\n");
        break;
      }
      case Mechanism::kRandomizedResponse:
        break;
    }
  }
  return Emit(a.out, content, out);
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string reports;
  std::string mechanism = "BiSampleMD";
  double epsilon = 1.0;
  std::string out;
};

absl::StatusOr<int> ParseBit(const std::string& field, size_t row) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  if (field == "-1") return -1;
  return absl::InvalidArgumentError(
      absl::StrCat("NonNumericValue: report row ", row, " field '", field,
                   "'"));
}

absl::Status Estimate(const EstimateArgs& a, std::ostream& out) {
  absl::StatusOr<Mechanism> mechanism = ParseMechanism(a.mechanism);
  if (!mechanism.ok()) return ConfigError(mechanism.status().message());
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(a.epsilon);
  if (!budget.ok()) return ConfigError(budget.status().message());
  absl::StatusOr<std::vector<std::vector<std::string>>> records =
      ReadRecords(a.reports, ',');
  if (!records.ok()) return records.status();
  const std::vector<std::string> header = {"direction", "bit"};
  const std::vector<std::string> kv_header = {"key", "value"};
  const std::vector<std::string> value_header = {"value"};
  if (records->empty()) return absl::InvalidArgumentError("empty report file");

  std::string content = "quantity,value\n";
  auto add = [&content](absl::string_view name, double v) {
    absl::StrAppend(&content, name, ",", FormatDouble(v), "\n");
  };
  switch (*mechanism) {
    case Mechanism::kBiSample:
    case Mechanism::kBiSampleMd: {
      if (records->front() != header) {
        return absl::InvalidArgumentError("expected header 'direction,bit'");
      }
      DirectionCounts counts;
      for (size_t i = 1; i < records->size(); ++i) {
        const auto& r = (*records)[i];
        if (r.size() != 2) {
          return absl::InvalidArgumentError(
              absl::StrCat("report row ", i, " does not have 2 fields"));
        }
        absl::StatusOr<int> d = ParseBit(r[0], i);
        absl::StatusOr<int> b = ParseBit(r[1], i);
        if (!d.ok()) return d.status();
        if (!b.ok()) return b.status();
        counts.Add({*d == 1 ? SamplingDirection::kPositive
                            : SamplingDirection::kNegative,
                    *b == 1});
      }
      absl::StatusOr<EstimateSummary> s = Summarize(counts, *budget);
      if (!s.ok()) return s.status();
      add("n", static_cast<double>(s->n));
      add("f_pos", s->f_pos);
      add("f_neg", s->f_neg);
      add("mean_basic", s->m_basic);
      add("sum", s->s_star);
      add("missing_rate_raw", s->f_bot_raw);
      add("missing_rate", s->f_bot_clamped);
      if (s->m_star_raw) {
        add("mean_md_raw", *s->m_star_raw);
        add("mean_md", *s->m_star_clamped);
      }
      break;
    }
    case Mechanism::kPrivKvm: {
      if (records->front() != kv_header) {
        return absl::InvalidArgumentError("expected header 'key,value'");
      }
      KvCounts counts;
      for (size_t i = 1; i < records->size(); ++i) {
        const auto& r = (*records)[i];
        if (r.size() != 2) {
          return absl::InvalidArgumentError(
              absl::StrCat("report row ", i, " does not have 2 fields"));
        }
        absl::StatusOr<int> k = ParseBit(r[0], i);
        absl::StatusOr<int> v = ParseBit(r[1], i);
        if (!k.ok()) return k.status();
        if (!v.ok()) return v.status();
        counts.Add({*k == 1, static_cast<double>(*v)});
      }
      absl::StatusOr<PrivKvmConfig> kvm = PrivKvmConfig::Create(*budget);
      if (!kvm.ok()) return kvm.status();
      add("n", static_cast<double>(counts.n()));
      add("missing_rate", 1.0 - PrivKvmKeyFrequency(counts, *kvm));
      absl::StatusOr<KvmEstimate> e = PrivKvmEstimate(counts, *kvm);
      if (!e.ok()) return e.status();
      add("mean", e->mean);
      break;
    }
    case Mechanism::kHarmony:
    case Mechanism::kPiecewise: {
      if (records->front() != value_header) {
        return absl::InvalidArgumentError("expected header 'value'");
      }
      double total = 0.0;
      size_t n = 0;
      for (size_t i = 1; i < records->size(); ++i) {
        const auto& r = (*records)[i];
        const std::optional<double> v =
            r.size() == 1 ? ParseDouble(r[0]) : std::nullopt;
        if (!v) {
          return absl::InvalidArgumentError(
              absl::StrCat("NonNumericValue: report row ", i));
        }
        total += *v;
        ++n;
      }
      if (n == 0) return absl::InvalidArgumentError("no reports");
      add("n", static_cast<double>(n));
      add("mean", total / static_cast<double>(n));
      break;
    }
    case Mechanism::kRandomizedResponse:
      return ConfigError("estimate does not support RR");
  }
  return Emit(a.out, content, out);
}

// ---------------------------------------------------------------------------

struct AuditArgs {
  std::vector<std::string> mechanisms = {"RR", "Harmony", "BiSample",
                                         "BiSampleMD"};
  std::vector<double> epsilons = {0.1, 0.5, 1.0, 2.0, 1.0986122886681098};
  int points = 201;
  int bins = 64;
  bool text = false;
  std::string out;
};

absl::Status Audit(const AuditArgs& a, std::ostream& out) {
  if (a.points < 2) return ConfigError("--points must be >= 2");
  if (a.bins < 1) return ConfigError("--bins must be >= 1");
  ChannelOptions options;
  options.piecewise_bins = a.bins;
  std::string content = a.text ? "" : absl::StrCat(AuditCsvHeader(), "\n");
  for (const std::string& name : a.mechanisms) {
    absl::StatusOr<Mechanism> m = ParseMechanism(name);
    if (!m.ok()) return ConfigError(m.status().message());
    for (double eps : a.epsilons) {
      absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(eps);
      if (!budget.ok()) return ConfigError(budget.status().message());
      const std::vector<PreparedValue> grid = DefaultAuditGrid(*m, a.points);
      absl::StatusOr<ChannelMatrix> matrix =
          ComputeChannelMatrix(*m, *budget, grid, options);
      if (!matrix.ok()) return matrix.status();
      absl::StatusOr<AuditReport> report = AuditEpsilon(*matrix);
      if (!report.ok()) return report.status();
      absl::StrAppend(&content,
                      a.text ? FormatAuditText(*report)
                             : FormatAuditCsvRecord(*report),
                      "\n");
    }
  }
  return Emit(a.out, content, out);
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  uint64_t seed = 0;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string output;
  std::string trials_output;
};

absl::Status Experiment(const ExperimentArgs& a, std::ostream& out) {
  absl::StatusOr<ExperimentConfig> config = LoadExperimentConfig(a.config);
  if (!config.ok()) return config.status();
  config->seed = a.seed;
  if (a.trials) config->trials = *a.trials;
  if (a.threads) config->threads = *a.threads;
  if (!a.output.empty()) config->output = a.output;
  if (!a.trials_output.empty()) config->trials_output = a.trials_output;

  absl::StatusOr<ExperimentResult> result = RunExperiment(*config);
  if (!result.ok()) return result.status();
  if (absl::Status s =
          Emit(config->output, FormatMetricsCsv(result->metrics), out);
      !s.ok()) {
    return s;
  }
  if (!config->trials_output.empty()) {
    return WriteTrialsCsv(result->trials, config->trials_output);
  }
  return absl::OkStatus();
}

}  // namespace

int ExitCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
      return 2;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kNotFound:
      return 3;
    default:
      return 1;
  }
}

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Local differential privacy mean and missing-rate toolkit",
               "ldpmd"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Emit a population file");
  generate->add_option("--dataset", gen.dataset, "gauss|exp|uniform|file")
      ->capture_default_str();
  generate->add_option("--mu", gen.mu, "GAUSS mean")->capture_default_str();
  generate->add_option("--sigma", gen.sigma, "GAUSS sd")->capture_default_str();
  generate->add_option("--scale", gen.scale, "EXP scale")->capture_default_str();
  generate->add_option("--path", gen.path, "CSV file for --dataset file");
  generate->add_option("--column", gen.column, "Column name or index");
  generate->add_option("--delimiter", gen.delimiter)->capture_default_str();
  generate->add_flag("--no-header", gen.no_header,
                     "File has no header; --column is an index");
  generate->add_option("-n,--n", gen.n, "Population size")
      ->capture_default_str();
  generate->add_option("--pref-mu", gen.pref_mu)->capture_default_str();
  generate->add_option("--pref-sigma", gen.pref_sigma)->capture_default_str();
  generate->add_option("--missing-rate", gen.missing_rate,
                       "Force this missing rate at --epsilon");
  generate->add_option("--epsilon", gen.epsilon);
  generate->add_option("--seed", gen.seed)->required();
  generate->add_option("-o,--out", gen.out, "Output path (default stdout)");

  PerturbArgs pert;
  CLI::App* perturb =
      app.add_subcommand("perturb", "Stream reports for a population");
  perturb->add_option("--population", pert.population)->required();
  perturb->add_option("--mechanism", pert.mechanism)->capture_default_str();
  perturb->add_option("--epsilon", pert.epsilon)->required();
  perturb->add_option("--behavior", pert.behavior,
                      "null for BiSampleMD/PrivKVM, top|rnd otherwise");
  perturb->add_option("--seed", pert.seed)->required();
  perturb->add_option("-o,--out", pert.out);

  EstimateArgs est;
  CLI::App* estimate =
      app.add_subcommand("estimate", "Aggregate a report stream");
  estimate->add_option("--reports", est.reports)->required();
  estimate->add_option("--mechanism", est.mechanism)->capture_default_str();
  estimate->add_option("--epsilon", est.epsilon)->required();
  estimate->add_option("-o,--out", est.out);

  AuditArgs aud;
  CLI::App* audit = app.add_subcommand("audit", "Analytic privacy audits");
  audit->add_option("--mechanism", aud.mechanisms)->capture_default_str();
  audit->add_option("--epsilon", aud.epsilons)->capture_default_str();
  audit->add_option("--points", aud.points)->capture_default_str();
  audit->add_option("--bins", aud.bins, "PM output bins")
      ->capture_default_str();
  audit->add_flag("--text", aud.text, "Human-readable output");
  audit->add_option("-o,--out", aud.out);

  ExperimentArgs exp;
  CLI::App* experiment =
      app.add_subcommand("experiment", "Run a configured sweep to CSV");
  experiment->add_option("--config", exp.config)->required();
  experiment->add_option("--seed", exp.seed)->required();
  experiment->add_option("--trials", exp.trials);
  experiment->add_option("--threads", exp.threads);
  experiment->add_option("-o,--output", exp.output);
  experiment->add_option("--trials-output", exp.trials_output);

  ReproduceOptions rep;
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Run the built-in sweeps");
  reproduce->add_option("--out-dir", rep.out_dir)->capture_default_str();
  reproduce->add_option("--seed", rep.seed)->capture_default_str();
  reproduce->add_option("--trials", rep.trials, "Override trials per point");
  reproduce->add_option("--n", rep.n, "Override single-size populations");
  reproduce->add_option("--threads", rep.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  absl::Status status;
  if (*generate) {
    status = Generate(gen, out);
  } else if (*perturb) {
    status = Perturb(pert, out);
  } else if (*estimate) {
    status = Estimate(est, out);
  } else if (*audit) {
    status = Audit(aud, out);
  } else if (*experiment) {
    status = Experiment(exp, out);
  } else if (*reproduce) {
    status = RunReproduction(rep, &err);
  }
  if (!status.ok()) err << "error: " << status.message() << "\n";
  return ExitCode(status);
}

}  // namespace ldpmd::cli
