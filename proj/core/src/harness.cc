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


#include "ldpmd/harness.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "ldpmd/csv.h"
#include "ldpmd/estimation.h"
#include "ldpmd/privkvm.h"
#include "nlohmann/json.hpp"

namespace ldpmd {

namespace {

using Json = nlohmann::json;

constexpr uint64_t kPopulationTag = 1;
constexpr uint64_t kBehaviorTag = 2;
constexpr uint64_t kPerturbTag = 3;
constexpr uint64_t kTruthRateTag = 4;

constexpr uint64_t kValuesStream = 1;
constexpr uint64_t kPreferenceStream = 2;
constexpr uint64_t kSubsetStream = 3;

absl::Status ConfigError(absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat("ConfigError: ", message));
}

bool IsForcing(BehaviorMode mode) { return mode != BehaviorMode::kNullValue; }

// ---------------------------------------------------------------------------
// Config parsing.

absl::StatusOr<double> GetNumber(const Json& j, absl::string_view key) {
  if (!j.is_number()) {
    return ConfigError(absl::StrCat("'", key, "' must be a number"));
  }
  return j.get<double>();
}

absl::StatusOr<std::vector<double>> GetNumberList(const Json& j,
                                                  absl::string_view key) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
    return out;
  }
  if (!j.is_array()) {
    return ConfigError(
        absl::StrCat("'", key, "' must be a number or a list of numbers"));
  }
  for (const Json& item : j) {
    absl::StatusOr<double> v = GetNumber(item, key);
    if (!v.ok()) return v.status();
    out.push_back(*v);
  }
  return out;
}

absl::StatusOr<uint64_t> GetCount(const Json& j, absl::string_view key) {
  if (j.is_number_unsigned()) return j.get<uint64_t>();
  if (j.is_number_integer() && j.get<int64_t>() >= 0) {
    return static_cast<uint64_t>(j.get<int64_t>());
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0 && v == std::floor(v) && v < 1.8e19) {
      return static_cast<uint64_t>(v);
    }
  }
  return ConfigError(
      absl::StrCat("'", key, "' must be a non-negative integer"));
}

absl::StatusOr<std::vector<std::string>> GetStringList(const Json& j,
                                                       absl::string_view key) {
  std::vector<std::string> out;
  if (j.is_string()) {
    out.push_back(j.get<std::string>());
    return out;
  }
  if (!j.is_array()) {
    return ConfigError(
        absl::StrCat("'", key, "' must be a string or a list of strings"));
  }
  for (const Json& item : j) {
    if (!item.is_string()) {
      return ConfigError(absl::StrCat("'", key, "' entries must be strings"));
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

absl::StatusOr<std::string> GetString(const Json& j, absl::string_view key) {
  if (!j.is_string()) {
    return ConfigError(absl::StrCat("'", key, "' must be a string"));
  }
  return j.get<std::string>();
}

absl::Status ParseDataset(const Json& j, DatasetSpec& spec) {
  std::string name;
  if (j.is_string()) {
    name = j.get<std::string>();
  } else if (j.is_object()) {
    if (!j.contains("name")) return ConfigError("dataset needs a 'name'");
    absl::StatusOr<std::string> s = GetString(j["name"], "dataset.name");
    if (!s.ok()) return s.status();
    name = *s;
  } else {
    return ConfigError("'dataset' must be a name or an object");
  }
  if (name == "gauss") {
    spec.kind = DatasetKind::kGauss;
  } else if (name == "exp") {
    spec.kind = DatasetKind::kExp;
  } else if (name == "uniform") {
    spec.kind = DatasetKind::kUniform;
  } else if (name == "file") {
    spec.kind = DatasetKind::kFile;
  } else {
    return ConfigError(absl::StrCat("unknown dataset '", name,
                                    "' (expected gauss|exp|uniform|file)"));
  }
  if (!j.is_object()) return absl::OkStatus();

  for (const auto& [key, value] : j.items()) {
    if (key == "name") continue;
    const std::string full = absl::StrCat("dataset.", key);
    if (key == "mu" || key == "sigma" || key == "scale") {
      absl::StatusOr<double> v = GetNumber(value, full);
      if (!v.ok()) return v.status();
      (key == "mu" ? spec.mu : key == "sigma" ? spec.sigma : spec.scale) = *v;
    } else if (key == "path") {
      absl::StatusOr<std::string> s = GetString(value, full);
      if (!s.ok()) return s.status();
      spec.path = *s;
    } else if (key == "column") {
      if (value.is_number_integer()) {
        spec.column = std::to_string(value.get<int64_t>());
      } else {
        absl::StatusOr<std::string> s = GetString(value, full);
        if (!s.ok()) return s.status();
        spec.column = *s;
      }
    } else if (key == "delimiter") {
      absl::StatusOr<std::string> s = GetString(value, full);
      if (!s.ok()) return s.status();
      if (s->size() != 1) return ConfigError("dataset.delimiter must be 1 char");
      spec.column_options.delimiter = (*s)[0];
    } else if (key == "header") {
      if (!value.is_boolean()) return ConfigError("dataset.header must be bool");
      spec.column_options.has_header = value.get<bool>();
    } else {
      return ConfigError(absl::StrCat("unknown key '", full, "'"));
    }
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Trial execution.

uint64_t Bits(double x) { return std::bit_cast<uint64_t>(x); }

uint64_t ArmKey(const Arm& arm) {
  return static_cast<uint64_t>(arm.mechanism) * 8 +
         static_cast<uint64_t>(arm.behavior);
}

RandomStream PointStream(const ExperimentConfig& config, uint64_t tag,
                         int trial_index, const SweepPoint& point) {
  return RandomStream(config.seed)
      .Fork(tag)
      .Fork(static_cast<uint64_t>(trial_index))
      .Fork(Bits(point.epsilon))
      .Fork(point.n)
      .Fork(point.missing_rate ? Bits(*point.missing_rate) : ~uint64_t{0});
}

// Status tag: the identifier before the first ':' if there is one.
std::string ErrorTag(const absl::Status& status) {
  const absl::string_view message = status.message();
  const size_t colon = message.find(':');
  if (colon != absl::string_view::npos && colon > 0 &&
      std::all_of(message.begin(), message.begin() + colon,
                  [](char c) { return std::isalnum(static_cast<unsigned char>(c)); })) {
    return std::string(message.substr(0, colon));
  }
  return std::string(absl::StatusCodeToString(status.code()));
}

// Users and ground truth shared by every arm of one (point, trial).
struct TrialWorld {
  Population population;
  GroundTruth truth;
};

absl::StatusOr<TrialWorld> BuildWorld(const ExperimentConfig& config,
                                      const SweepPoint& point, int trial_index,
                                      const PrivacyBudget& budget,
                                      const std::vector<double>* file_values) {
  const uint64_t population_trial =
      config.fixed_population ? 0 : static_cast<uint64_t>(trial_index) + 1;
  const RandomStream stream = RandomStream(config.seed)
                                  .Fork(kPopulationTag)
                                  .Fork(population_trial)
                                  .Fork(point.n);
  std::vector<double> values;
  switch (config.dataset.kind) {
    case DatasetKind::kGauss:
      values = GenGauss(point.n, config.dataset.mu, config.dataset.sigma,
                        stream.Fork(kValuesStream));
      break;
    case DatasetKind::kExp:
      values = GenExp(point.n, config.dataset.scale, stream.Fork(kValuesStream));
      break;
    case DatasetKind::kUniform:
      values = GenUniform(point.n, stream.Fork(kValuesStream));
      break;
    case DatasetKind::kFile:
      if (file_values == nullptr) {
        return absl::InternalError("file dataset values were not loaded");
      }
      values = *file_values;
      break;
  }
  std::vector<double> preferences =
      GenPreferences(values.size(), config.preference_mu,
                     config.preference_sigma, stream.Fork(kPreferenceStream));
  const std::string provenance =
      absl::StrCat(config.dataset.Name(), " seed=", config.seed,
                   " trial=", population_trial);
  absl::StatusOr<Population> population =
      MakePopulation(values, preferences, provenance);
  if (!population.ok()) return population.status();
  if (point.missing_rate) {
    population = ForceMissingRate(*population, *point.missing_rate, budget,
                                  stream.Fork(kSubsetStream));
    if (!population.ok()) return population.status();
  }
  GroundTruth truth = ComputeGroundTruth(*population, budget);
  return TrialWorld{*std::move(population), truth};
}

std::vector<PreparedValue> PrepareAll(const ExperimentConfig& config,
                                      const TrialWorld& world,
                                      const SweepPoint& point, int trial_index,
                                      const PrivacyBudget& budget,
                                      BehaviorMode mode) {
  RandomStream rng = PointStream(config, kBehaviorTag, trial_index, point)
                         .Fork(static_cast<uint64_t>(mode));
  std::vector<PreparedValue> prepared;
  prepared.reserve(world.population.size());
  for (const UserRecord& user : world.population.users()) {
    prepared.push_back(ApplyBehavior(user, budget, mode, rng));
  }
  return prepared;
}

absl::Status RunArm(const ExperimentConfig& config, const Arm& arm,
                    const SweepPoint& point, int trial_index,
                    const PrivacyBudget& budget,
                    const std::vector<PreparedValue>& prepared,
                    TrialResult& result) {
  RandomStream rng = PointStream(config, kPerturbTag, trial_index, point)
                         .Fork(ArmKey(arm));
  const double n = static_cast<double>(prepared.size());
  auto record_error = [&result](const absl::Status& status) {
    if (result.status == "ok") result.status = ErrorTag(status);
  };

  switch (arm.mechanism) {
    case Mechanism::kHarmony:
    case Mechanism::kPiecewise: {
      double total = 0.0;
      for (const PreparedValue& pv : prepared) {
        absl::StatusOr<double> out =
            arm.mechanism == Mechanism::kHarmony
                ? HarmonyPerturb(pv.value(), budget, rng)
                : PiecewisePerturb(pv.value(), budget, rng);
        if (!out.ok()) return out.status();
        total += *out;
      }
      result.m_est = total / n;
      break;
    }
    case Mechanism::kBiSample: {
      DirectionCounts counts;
      for (const PreparedValue& pv : prepared) {
        absl::StatusOr<PerturbedReport> report =
            BiSamplePerturb(pv.value(), budget, rng);
        if (!report.ok()) return report.status();
        counts.Add(*report);
      }
      absl::StatusOr<double> m = MeanEstimateBasic(counts, budget);
      if (m.ok()) {
        result.m_est = *m;
      } else {
        record_error(m.status());
      }
      break;
    }
    case Mechanism::kBiSampleMd: {
      DirectionCounts counts;
      for (const PreparedValue& pv : prepared) {
        counts.Add(BiSampleMdPerturb(pv, budget, rng));
      }
      absl::StatusOr<double> mr = MissingRateEstimate(counts, budget);
      if (mr.ok()) {
        result.mr_est = *mr;
      } else {
        record_error(mr.status());
      }
      absl::StatusOr<double> m = MeanEstimateMd(counts, budget);
      if (m.ok()) {
        result.m_est = *m;
      } else {
        record_error(m.status());
      }
      break;
    }
    case Mechanism::kPrivKvm: {
      absl::StatusOr<PrivKvmConfig> kvm = PrivKvmConfig::Create(
          budget, 1, config.privkvm_virtual_iterations);
      if (!kvm.ok()) return kvm.status();
      KvCounts counts;
      for (const PreparedValue& pv : prepared) {
        absl::StatusOr<KvPair> report = PrivKvmPerturb(KvEncode(pv), *kvm, rng);
        if (!report.ok()) return report.status();
        counts.Add(*report);
      }
      result.mr_est = 1.0 - PrivKvmKeyFrequency(counts, *kvm);
      absl::StatusOr<KvmEstimate> estimate = PrivKvmEstimate(counts, *kvm);
      if (estimate.ok()) {
        result.m_est = estimate->mean;
      } else {
        record_error(estimate.status());
      }
      break;
    }
    case Mechanism::kRandomizedResponse:
      return ConfigError("RR is not a mean-estimation mechanism");
  }
  if (result.m_est && !result.m_true && result.status == "ok") {
    result.status = "NoResponders";
  }
  return absl::OkStatus();
}

// Runs every arm on one (point, trial); results are in `arms` order.
absl::StatusOr<std::vector<TrialResult>> RunUnit(
    const ExperimentConfig& config, const std::vector<Arm>& arms,
    const SweepPoint& point, int trial_index,
    const std::vector<double>* file_values) {
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(point.epsilon);
  if (!budget.ok()) return budget.status();
  absl::StatusOr<TrialWorld> world =
      BuildWorld(config, point, trial_index, *budget, file_values);
  if (!world.ok()) return world.status();

  std::map<BehaviorMode, std::vector<PreparedValue>> prepared;
  std::vector<TrialResult> results;
  results.reserve(arms.size());
  for (const Arm& arm : arms) {
    auto it = prepared.find(arm.behavior);
    if (it == prepared.end()) {
      it = prepared
               .emplace(arm.behavior,
                        PrepareAll(config, *world, point, trial_index, *budget,
                                   arm.behavior))
               .first;
    }
    TrialResult result;
    result.arm = arm;
    result.dataset = config.dataset.Name();
    result.point = point;
    result.point.n = world->truth.n;
    result.trial_index = trial_index;
    result.mr_true = world->truth.missing_rate;
    result.m_true = IsNullAware(arm.mechanism)
                        ? world->truth.responder_mean
                        : std::optional<double>(world->truth.overall_mean);
    if (absl::Status s = RunArm(config, arm, point, trial_index, *budget,
                                it->second, result);
        !s.ok()) {
      return s;
    }
    results.push_back(std::move(result));
  }
  return results;
}

absl::StatusOr<std::vector<double>> LoadFileValues(
    const ExperimentConfig& config) {
  if (config.dataset.kind != DatasetKind::kFile) return std::vector<double>{};
  return LoadNumericColumn(config.dataset.path, config.dataset.column,
                           config.dataset.column_options);
}

std::string OptionalField(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

auto SortKey(const Arm& arm, const SweepPoint& point) {
  return std::make_tuple(std::string(MechanismName(arm.mechanism)),
                         std::string(BehaviorName(arm.behavior)),
                         point.epsilon, point.n,
                         point.missing_rate.value_or(-1.0));
}

std::vector<double> Range(double first, double last, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::lround((last - first) / step));
  // Rounded to 10 decimals so 0.1 * 3 is written as 0.3.
  for (int i = 0; i <= count; ++i) {
    out.push_back(std::round((first + step * i) * 1e10) / 1e10);
  }
  return out;
}

}  // namespace

std::string DatasetSpec::Name() const {
  switch (kind) {
    case DatasetKind::kGauss:
      return "gauss";
    case DatasetKind::kExp:
      return "exp";
    case DatasetKind::kUniform:
      return "uniform";
    case DatasetKind::kFile:
      return std::filesystem::path(path).stem().string();
  }
  return "unknown";
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view json) {
  const Json root = Json::parse(json.begin(), json.end(), nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) return ConfigError("config is not valid JSON");
  if (!root.is_object()) return ConfigError("config must be a JSON object");

  ExperimentConfig config;
  for (const auto& [key, value] : root.items()) {
    if (key == "dataset") {
      if (absl::Status s = ParseDataset(value, config.dataset); !s.ok()) {
        return s;
      }
    } else if (key == "n") {
      config.sizes.clear();
      const std::vector<Json> items =
          value.is_array() ? value.get<std::vector<Json>>()
                           : std::vector<Json>{value};
      for (const Json& item : items) {
        absl::StatusOr<uint64_t> n = GetCount(item, "n");
        if (!n.ok()) return n.status();
        config.sizes.push_back(*n);
      }
    } else if (key == "epsilon") {
      absl::StatusOr<std::vector<double>> v = GetNumberList(value, key);
      if (!v.ok()) return v.status();
      config.epsilons = *v;
    } else if (key == "mechanisms" || key == "mechanism") {
      absl::StatusOr<std::vector<std::string>> names =
          GetStringList(value, key);
      if (!names.ok()) return names.status();
      config.mechanisms.clear();
      for (const std::string& name : *names) {
        absl::StatusOr<Mechanism> m = ParseMechanism(name);
        if (!m.ok()) return ConfigError(m.status().message());
        config.mechanisms.push_back(*m);
      }
    } else if (key == "behaviors" || key == "behavior") {
      absl::StatusOr<std::vector<std::string>> names =
          GetStringList(value, key);
      if (!names.ok()) return names.status();
      config.behaviors.clear();
      for (const std::string& name : *names) {
        absl::StatusOr<BehaviorMode> b = ParseBehavior(name);
        if (!b.ok()) return ConfigError(b.status().message());
        config.behaviors.push_back(*b);
      }
    } else if (key == "preferences") {
      if (!value.is_object()) {
        return ConfigError("'preferences' must be an object {mu, sigma}");
      }
      for (const auto& [pkey, pvalue] : value.items()) {
        absl::StatusOr<double> v =
            GetNumber(pvalue, absl::StrCat("preferences.", pkey));
        if (!v.ok()) return v.status();
        if (pkey == "mu") {
          config.preference_mu = *v;
        } else if (pkey == "sigma") {
          config.preference_sigma = *v;
        } else {
          return ConfigError(
              absl::StrCat("unknown key 'preferences.", pkey, "'"));
        }
      }
    } else if (key == "missing_rates" || key == "missing_rate") {
      absl::StatusOr<std::vector<double>> v = GetNumberList(value, key);
      if (!v.ok()) return v.status();
      config.missing_rates = *v;
    } else if (key == "trials" || key == "threads" ||
               key == "privkvm_virtual_iterations") {
      absl::StatusOr<uint64_t> v = GetCount(value, key);
      if (!v.ok()) return v.status();
      if (*v > 1000000000) return ConfigError(absl::StrCat("'", key, "' too large"));
      const int as_int = static_cast<int>(*v);
      (key == "trials"    ? config.trials
       : key == "threads" ? config.threads
                          : config.privkvm_virtual_iterations) = as_int;
    } else if (key == "seed") {
      absl::StatusOr<uint64_t> v = GetCount(value, key);
      if (!v.ok()) return v.status();
      config.seed = *v;
    } else if (key == "fixed_population") {
      if (!value.is_boolean()) {
        return ConfigError("'fixed_population' must be a boolean");
      }
      config.fixed_population = value.get<bool>();
    } else if (key == "output" || key == "trials_output") {
      absl::StatusOr<std::string> s = GetString(value, key);
      if (!s.ok()) return s.status();
      (key == "output" ? config.output : config.trials_output) = *s;
    } else {
      return ConfigError(absl::StrCat("unknown key '", key, "'"));
    }
  }
  return config;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("FileNotFound: ", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str());
}

absl::Status ValidateConfig(const ExperimentConfig& config) {
  if (config.trials < 1) {
    return ConfigError(absl::StrCat("trials must be >= 1, got ", config.trials));
  }
  if (config.threads < 0) return ConfigError("threads must be >= 0");
  if (config.epsilons.empty()) return ConfigError("epsilon list is empty");
  for (double eps : config.epsilons) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      return ConfigError(absl::StrCat("epsilon must be positive, got ", eps));
    }
  }
  if (config.dataset.kind == DatasetKind::kFile) {
    if (config.dataset.path.empty() || config.dataset.column.empty()) {
      return ConfigError("file datasets need 'path' and 'column'");
    }
  } else {
    if (config.sizes.empty()) return ConfigError("n list is empty");
    for (uint64_t n : config.sizes) {
      if (n == 0) return ConfigError("n must be >= 1");
    }
  }
  if (config.dataset.kind == DatasetKind::kGauss &&
      !(config.dataset.sigma >= 0.0)) {
    return ConfigError("dataset.sigma must be >= 0");
  }
  if (config.dataset.kind == DatasetKind::kExp &&
      !(config.dataset.scale > 0.0)) {
    return ConfigError("dataset.scale must be > 0");
  }
  if (!(config.preference_sigma >= 0.0)) {
    return ConfigError("preferences.sigma must be >= 0");
  }
  for (double rate : config.missing_rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      return ConfigError(
          absl::StrCat("missing rate ", rate, " is outside [0, 1]"));
    }
  }
  if (config.mechanisms.empty()) return ConfigError("mechanism list is empty");
  if (config.behaviors.empty()) return ConfigError("behavior list is empty");

  bool any_null_aware = false;
  bool any_forcing = false;
  for (Mechanism m : config.mechanisms) {
    if (m == Mechanism::kRandomizedResponse) {
      return ConfigError("RR estimates a bit frequency, not a mean");
    }
    (IsNullAware(m) ? any_null_aware : any_forcing) = true;
  }
  const bool wants_null =
      std::find(config.behaviors.begin(), config.behaviors.end(),
                BehaviorMode::kNullValue) != config.behaviors.end();
  const bool wants_forcing = std::any_of(config.behaviors.begin(),
                                         config.behaviors.end(), IsForcing);
  if (any_forcing && !wants_forcing) {
    return ConfigError(
        "Harmony, PM and BiSample cannot take null values; use behavior top "
        "or rnd");
  }
  if (wants_null && !any_null_aware) {
    return ConfigError(
        "only BiSampleMD and PrivKVM accept NullValue populations");
  }
  if (wants_forcing && !any_forcing) {
    return ConfigError(
        "behaviors top and rnd apply only to Harmony, PM and BiSample");
  }
  if (config.privkvm_virtual_iterations < 0) {
    return ConfigError("privkvm_virtual_iterations must be >= 0");
  }
  return absl::OkStatus();
}

std::vector<Arm> ExpandArms(const ExperimentConfig& config) {
  std::vector<Arm> arms;
  for (Mechanism m : config.mechanisms) {
    if (IsNullAware(m)) {
      const Arm arm{m, BehaviorMode::kNullValue};
      if (std::find(arms.begin(), arms.end(), arm) == arms.end()) {
        arms.push_back(arm);
      }
      continue;
    }
    for (BehaviorMode b : config.behaviors) {
      const Arm arm{m, b};
      if (IsForcing(b) &&
          std::find(arms.begin(), arms.end(), arm) == arms.end()) {
        arms.push_back(arm);
      }
    }
  }
  return arms;
}

std::vector<SweepPoint> ExpandSweep(const ExperimentConfig& config) {
  std::vector<uint64_t> sizes = config.sizes;
  // File datasets fill n in once the file is read.
  if (config.dataset.kind == DatasetKind::kFile) sizes = {0};
  std::vector<SweepPoint> points;
  for (double eps : config.epsilons) {
    for (uint64_t n : sizes) {
      if (config.missing_rates.empty()) {
        points.push_back({eps, n, std::nullopt});
      } else {
        for (double rate : config.missing_rates) {
          points.push_back({eps, n, rate});
        }
      }
    }
  }
  return points;
}

absl::StatusOr<TrialResult> RunTrial(const ExperimentConfig& config,
                                     const Arm& arm, const SweepPoint& point,
                                     int trial_index) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  absl::StatusOr<std::vector<double>> file_values = LoadFileValues(config);
  if (!file_values.ok()) return file_values.status();
  SweepPoint effective = point;
  if (config.dataset.kind == DatasetKind::kFile) {
    effective.n = file_values->size();
  }
  absl::StatusOr<std::vector<TrialResult>> results =
      RunUnit(config, {arm}, effective, trial_index, &*file_values);
  if (!results.ok()) return results.status();
  return std::move(results->front());
}

MetricRow SummarizeTrials(const std::vector<TrialResult>& trials) {
  MetricRow row;
  if (trials.empty()) {
    row.status = "failed";
    return row;
  }
  row.arm = trials.front().arm;
  row.dataset = trials.front().dataset;
  row.point = trials.front().point;
  row.trials = static_cast<int>(trials.size());

  double abs_m = 0.0, sq_m = 0.0, abs_mr = 0.0, sq_mr = 0.0;
  int count_m = 0, count_mr = 0;
  const bool null_aware = IsNullAware(row.arm.mechanism);
  for (const TrialResult& t : trials) {
    const bool m_ok = t.m_est && t.m_true;
    const bool mr_ok = t.mr_est.has_value();
    if (m_ok) {
      const double e = *t.m_est - *t.m_true;
      abs_m += std::fabs(e);
      sq_m += e * e;
      ++count_m;
    }
    if (mr_ok) {
      const double e = *t.mr_est - t.mr_true;
      abs_mr += std::fabs(e);
      sq_mr += e * e;
      ++count_mr;
    }
    if (!m_ok || (null_aware && !mr_ok) || t.status != "ok") {
      ++row.failures;
      if (row.error.empty()) row.error = t.status;
    }
  }
  if (count_m > 0) {
    row.ae_m = abs_m / count_m;
    row.var_m = sq_m / count_m;
  }
  if (count_mr > 0) {
    row.ae_mr = abs_mr / count_mr;
    row.var_mr = sq_mr / count_mr;
  }
  if (row.failures == 0) {
    row.status = "ok";
  } else if (row.failures < row.trials) {
    row.status = "partial";
  } else {
    row.status = "failed";
  }
  return row;
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  absl::StatusOr<std::vector<double>> file_values = LoadFileValues(config);
  if (!file_values.ok()) return file_values.status();

  const std::vector<Arm> arms = ExpandArms(config);
  std::vector<SweepPoint> points = ExpandSweep(config);
  if (config.dataset.kind == DatasetKind::kFile) {
    for (SweepPoint& p : points) p.n = file_values->size();
  }
  const size_t trials = static_cast<size_t>(config.trials);
  const size_t units = points.size() * trials;

  std::vector<absl::StatusOr<std::vector<TrialResult>>> unit_results(
      units, absl::UnknownError("not run"));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t u = next.fetch_add(1); u < units; u = next.fetch_add(1)) {
      unit_results[u] = RunUnit(config, arms, points[u / trials],
                                static_cast<int>(u % trials), &*file_values);
    }
  };
  size_t threads = config.threads > 0
                       ? static_cast<size_t>(config.threads)
                       : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, units);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& r : unit_results) {
    if (!r.ok()) return r.status();
  }

  struct Group {
    Arm arm;
    SweepPoint point;
    std::vector<TrialResult> trials;
  };
  std::vector<Group> groups;
  for (size_t a = 0; a < arms.size(); ++a) {
    for (size_t p = 0; p < points.size(); ++p) {
      Group g{arms[a], points[p], {}};
      g.trials.reserve(trials);
      for (size_t t = 0; t < trials; ++t) {
        g.trials.push_back((*unit_results[p * trials + t])[a]);
      }
      groups.push_back(std::move(g));
    }
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const Group& x, const Group& y) {
                     return SortKey(x.arm, x.point) < SortKey(y.arm, y.point);
                   });

  ExperimentResult result;
  for (Group& g : groups) {
    result.metrics.push_back(SummarizeTrials(g.trials));
    for (TrialResult& t : g.trials) result.trials.push_back(std::move(t));
  }
  return result;
}

std::string MetricsCsvHeader() {
  return "mechanism,behavior,dataset,epsilon,n,missing_rate,trials,failures,"
         "ae_m,var_m,ae_mr,var_mr,status,error";
}

std::string TrialsCsvHeader() {
  return "mechanism,behavior,dataset,epsilon,n,missing_rate,trial,m_true,"
         "m_est,mr_true,mr_est,status";
}

std::string FormatMetricsCsv(const std::vector<MetricRow>& rows) {
  std::string out = absl::StrCat(MetricsCsvHeader(), "\n");
  for (const MetricRow& r : rows) {
    absl::StrAppend(&out, MechanismName(r.arm.mechanism), ",",
                    BehaviorName(r.arm.behavior), ",", r.dataset, ",",
                    FormatDouble(r.point.epsilon), ",", r.point.n, ",",
                    OptionalField(r.point.missing_rate), ",", r.trials, ",",
                    r.failures, ",", OptionalField(r.ae_m), ",",
                    OptionalField(r.var_m), ",", OptionalField(r.ae_mr), ",");
    absl::StrAppend(&out, OptionalField(r.var_mr), ",", r.status, ",", r.error,
                    "\n");
  }
  return out;
}

std::string FormatTrialsCsv(const std::vector<TrialResult>& trials) {
  std::string out = absl::StrCat(TrialsCsvHeader(), "\n");
  for (const TrialResult& t : trials) {
    absl::StrAppend(&out, MechanismName(t.arm.mechanism), ",",
                    BehaviorName(t.arm.behavior), ",", t.dataset, ",",
                    FormatDouble(t.point.epsilon), ",", t.point.n, ",",
                    OptionalField(t.point.missing_rate), ",", t.trial_index,
                    ",", OptionalField(t.m_true), ",", OptionalField(t.m_est),
                    ",");
    absl::StrAppend(&out, FormatDouble(t.mr_true), ",", OptionalField(t.mr_est),
                    ",", t.status, "\n");
  }
  return out;
}

absl::Status WriteMetricsCsv(const std::vector<MetricRow>& rows,
                             const std::string& path) {
  return WriteFile(path, FormatMetricsCsv(rows));
}

absl::Status WriteTrialsCsv(const std::vector<TrialResult>& trials,
                            const std::string& path) {
  return WriteFile(path, FormatTrialsCsv(trials));
}

std::vector<NamedConfig> ReproductionConfigs(uint64_t seed) {
  const std::vector<double> eps_grid = {0.1, 0.5, 1, 2, 4, 6, 8};
  const std::vector<double> rate_grid = Range(0.1, 0.9, 0.1);

  ExperimentConfig base;
  base.seed = seed;
  base.trials = 100;
  base.sizes = {100000};

  std::vector<NamedConfig> out;
  const std::vector<std::pair<std::string, DatasetKind>> datasets = {
      {"exp", DatasetKind::kExp},
      {"gauss", DatasetKind::kGauss},
      {"uniform", DatasetKind::kUniform}};
  for (const auto& [name, kind] : datasets) {
    ExperimentConfig c = base;
    c.dataset.kind = kind;
    c.epsilons = eps_grid;
    c.mechanisms = {Mechanism::kHarmony, Mechanism::kPiecewise,
                    Mechanism::kBiSample, Mechanism::kBiSampleMd,
                    Mechanism::kPrivKvm};
    c.behaviors = {BehaviorMode::kNullValue, BehaviorMode::kTop,
                   BehaviorMode::kRnd};
    out.push_back({absl::StrCat("behavior_", name, ".csv"), c});
  }
  for (const auto& [name, kind] : datasets) {
    if (kind == DatasetKind::kUniform) continue;
    ExperimentConfig c = base;
    c.dataset.kind = kind;
    c.epsilons = {0.1, 1};
    c.missing_rates = rate_grid;
    c.mechanisms = {Mechanism::kBiSampleMd, Mechanism::kPrivKvm};
    out.push_back({absl::StrCat("missing_rate_", name, ".csv"), c});
  }
  ExperimentConfig sizes = base;
  sizes.dataset.kind = DatasetKind::kGauss;
  sizes.epsilons = {0.1};
  sizes.sizes = {1000, 10000, 100000};
  sizes.missing_rates = {0.3};
  sizes.mechanisms = {Mechanism::kHarmony, Mechanism::kPiecewise,
                      Mechanism::kBiSampleMd, Mechanism::kPrivKvm};
  sizes.behaviors = {BehaviorMode::kNullValue, BehaviorMode::kTop};
  out.push_back({"data_size.csv", sizes});
  return out;
}

std::string TruthRateCsv(double mu, double sigma, uint64_t n,
                         const std::vector<double>& epsilons, uint64_t seed) {
  const std::vector<double> preferences =
      GenPreferences(n, mu, sigma, RandomStream(seed).Fork(kTruthRateTag));
  std::string out = "epsilon,truth_rate,gaussian_tail\n";
  for (double eps : epsilons) {
    const double tail =
        sigma > 0 ? 0.5 * std::erfc((eps - mu) / (sigma * std::sqrt(2.0)))
                  : (eps <= mu ? 1.0 : 0.0);
    absl::StrAppend(&out, FormatDouble(eps), ",",
                    FormatDouble(TruthRate(preferences, eps)), ",",
                    FormatDouble(tail), "\n");
  }
  return out;
}

absl::Status RunReproduction(const ReproduceOptions& options,
                             std::ostream* log) {
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat(
        "IoError: cannot create ", options.out_dir, ": ", ec.message()));
  }
  const std::filesystem::path dir(options.out_dir);
  const uint64_t truth_n = options.n > 0 ? options.n : 100000;
  if (absl::Status s = WriteFile(
          (dir / "truth_rate.csv").string(),
          TruthRateCsv(5.0, 1.5, truth_n, Range(0.5, 10.0, 0.5), options.seed));
      !s.ok()) {
    return s;
  }
  if (log) *log << "wrote " << (dir / "truth_rate.csv").string() << "\n";

  for (NamedConfig& named : ReproductionConfigs(options.seed)) {
    ExperimentConfig& c = named.config;
    if (options.trials > 0) c.trials = options.trials;
    if (options.n > 0 && c.sizes.size() == 1) c.sizes = {options.n};
    c.threads = options.threads;
    absl::StatusOr<ExperimentResult> result = RunExperiment(c);
    if (!result.ok()) return result.status();
    const std::string path = (dir / named.file_name).string();
    if (absl::Status s = WriteMetricsCsv(result->metrics, path); !s.ok()) {
      return s;
    }
    if (log) *log << "wrote " << path << "\n";
  }
  return absl::OkStatus();
}

}  // namespace ldpmd
