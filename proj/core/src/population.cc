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

#include "ldpmd/population.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "ldpmd/csv.h"

namespace ldpmd {

namespace {

// Min-max map onto [-1, 1]; the extremes land exactly on -1 and +1.
void NormalizeInPlace(std::vector<double>& values, double lo, double hi) {
  for (double& v : values) v = 2.0 * (v - lo) / (hi - lo) - 1.0;
}

absl::Status CheckRecord(const UserRecord& user, size_t index) {
  if (!(user.value >= -1.0 && user.value <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "user ", index, " has value ", user.value, " outside [-1, 1]"));
  }
  if (!(user.preference > 0.0) || !std::isfinite(user.preference)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "user ", index, " has non-positive preference ", user.preference));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Population> Population::Create(std::vector<UserRecord> users,
                                              std::string provenance) {
  if (users.empty()) return absl::InvalidArgumentError("population is empty");
  for (size_t i = 0; i < users.size(); ++i) {
    if (absl::Status s = CheckRecord(users[i], i); !s.ok()) return s;
  }
  return Population(std::move(users), std::move(provenance));
}

absl::string_view BehaviorName(BehaviorMode mode) {
  switch (mode) {
    case BehaviorMode::kNullValue:
      return "null";
    case BehaviorMode::kTop:
      return "top";
    case BehaviorMode::kRnd:
      return "rnd";
  }
  return "unknown";
}

absl::StatusOr<BehaviorMode> ParseBehavior(absl::string_view name) {
  if (name == "null") return BehaviorMode::kNullValue;
  if (name == "top") return BehaviorMode::kTop;
  if (name == "rnd") return BehaviorMode::kRnd;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown behavior '", name, "' (expected null|top|rnd)"));
}

std::vector<double> GenGauss(size_t n, double mu, double sigma,
                             RandomStream rng) {
  std::vector<double> values(n);
  for (double& v : values) v = std::clamp(rng.Normal(mu, sigma), -1.0, 1.0);
  return values;
}

std::vector<double> GenExp(size_t n, double scale, RandomStream rng) {
  std::vector<double> values(n);
  for (double& v : values) v = rng.Exponential(scale);
  if (values.empty()) return values;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    std::fill(values.begin(), values.end(), 0.0);
    return values;
  }
  NormalizeInPlace(values, *lo, *hi);
  return values;
}

std::vector<double> GenUniform(size_t n, RandomStream rng) {
  std::vector<double> values(n);
  for (double& v : values) v = rng.Uniform(-1.0, 1.0);
  return values;
}

absl::StatusOr<std::vector<double>> LoadNumericColumn(
    const std::string& path, absl::string_view column,
    const ColumnOptions& options) {
  absl::StatusOr<std::vector<std::vector<std::string>>> records =
      ReadRecords(path, options.delimiter);
  if (!records.ok()) return records.status();

  size_t index = 0;
  size_t first_data = 0;
  if (options.has_header) {
    if (records->empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("EmptyColumn: ", path, " has no header"));
    }
    const std::vector<std::string>& header = records->front();
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) {
      return absl::NotFoundError(
          absl::StrCat("column '", column, "' not found in ", path));
    }
    index = static_cast<size_t>(it - header.begin());
    first_data = 1;
  } else {
    const std::optional<double> parsed = ParseDouble(column);
    if (!parsed || *parsed < 0 || *parsed != std::floor(*parsed)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "without a header the column must be an index, got '", column, "'"));
    }
    index = static_cast<size_t>(*parsed);
  }

  std::vector<double> values;
  values.reserve(records->size() - first_data);
  for (size_t row = first_data; row < records->size(); ++row) {
    const std::vector<std::string>& record = (*records)[row];
    const size_t data_row = row - first_data + 1;
    if (index >= record.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "NonNumericValue: row ", data_row, " has no column ", column));
    }
    const std::optional<double> v = ParseDouble(record[index]);
    if (!v) {
      return absl::InvalidArgumentError(
          absl::StrCat("NonNumericValue: row ", data_row, " value '",
                       record[index], "' in column ", column));
    }
    values.push_back(*v);
  }
  if (values.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("EmptyColumn: column ", column, " in ", path));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ConstantColumn: every value of column ", column, " is ", *lo));
  }
  NormalizeInPlace(values, *lo, *hi);
  return values;
}

std::vector<double> GenPreferences(size_t n, double mu, double sigma,
                                   RandomStream rng) {
  std::vector<double> preferences(n);
  for (double& e : preferences) {
    e = std::max(rng.Normal(mu, sigma), kPreferenceFloor);
  }
  return preferences;
}

double TruthRate(const std::vector<double>& preferences, double epsilon) {
  if (preferences.empty()) return 0.0;
  const auto truthful = std::count_if(
      preferences.begin(), preferences.end(),
      [epsilon](double e) { return epsilon <= e; });
  return static_cast<double>(truthful) /
         static_cast<double>(preferences.size());
}

absl::StatusOr<Population> MakePopulation(
    const std::vector<double>& values, const std::vector<double>& preferences,
    std::string provenance) {
  if (values.size() != preferences.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("values (", values.size(), ") and preferences (",
                     preferences.size(), ") differ in length"));
  }
  std::vector<UserRecord> users(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    users[i] = {values[i], preferences[i]};
  }
  return Population::Create(std::move(users), std::move(provenance));
}

PreparedValue ApplyBehavior(const UserRecord& user,
                            const PrivacyBudget& budget, BehaviorMode mode,
                            RandomStream& rng) {
  if (budget.epsilon() <= user.preference) {
    return *PreparedValue::Real(user.value);
  }
  switch (mode) {
    case BehaviorMode::kNullValue:
      return PreparedValue::Null();
    case BehaviorMode::kTop:
      return *PreparedValue::Real(1.0);
    case BehaviorMode::kRnd:
      return *PreparedValue::Real(rng.Uniform(-1.0, 1.0));
  }
  return PreparedValue::Null();
}

size_t ForcedMissingCount(double rate, size_t n) {
  // The slack absorbs representation error such as 0.29 * 100 = 28.999...
  const double target = std::floor(rate * static_cast<double>(n) + 1e-9);
  return std::min(n, static_cast<size_t>(std::max(target, 0.0)));
}

absl::StatusOr<Population> ForceMissingRate(const Population& population,
                                            double rate,
                                            const PrivacyBudget& budget,
                                            RandomStream rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing rate ", rate, " is outside [0, 1]"));
  }
  const size_t n = population.size();
  const size_t missing = ForcedMissingCount(rate, n);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  // Partial Fisher-Yates: the first `missing` slots are a uniform subset.
  for (size_t i = 0; i < missing; ++i) {
    const size_t j = i + static_cast<size_t>(rng.UniformInt(n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<UserRecord> users = population.users();
  for (UserRecord& user : users) user.preference = 2.0 * budget.epsilon();
  for (size_t i = 0; i < missing; ++i) {
    users[order[i]].preference = 0.5 * budget.epsilon();
  }
  return Population::Create(
      std::move(users),
      absl::StrCat(population.provenance(), "; forced missing rate ", rate));
}

GroundTruth ComputeGroundTruth(const Population& population,
                               const PrivacyBudget& budget) {
  GroundTruth truth;
  truth.n = population.size();
  double total = 0.0;
  double responder_total = 0.0;
  size_t responders = 0;
  for (const UserRecord& user : population.users()) {
    total += user.value;
    if (budget.epsilon() <= user.preference) {
      responder_total += user.value;
      ++responders;
    }
  }
  const double n = static_cast<double>(truth.n);
  truth.overall_mean = total / n;
  truth.missing_rate = static_cast<double>(truth.n - responders) / n;
  if (responders > 0) {
    truth.responder_mean = responder_total / static_cast<double>(responders);
  }
  return truth;
}

absl::Status WritePopulation(const Population& population,
                             const std::string& path) {
  std::string out = "value,preference\n";
  for (const UserRecord& user : population.users()) {
    absl::StrAppend(&out, FormatDouble(user.value), ",",
                    FormatDouble(user.preference), "\n");
  }
  return WriteFile(path, out);
}

absl::StatusOr<Population> ReadPopulation(const std::string& path) {
  absl::StatusOr<std::vector<std::vector<std::string>>> records =
      ReadRecords(path, ',');
  if (!records.ok()) return records.status();
  if (records->empty() || records->front() !=
                              std::vector<std::string>{"value", "preference"}) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": expected header 'value,preference'"));
  }
  std::vector<UserRecord> users;
  users.reserve(records->size() - 1);
  for (size_t row = 1; row < records->size(); ++row) {
    const std::vector<std::string>& record = (*records)[row];
    if (record.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": row ", row, " does not have 2 fields"));
    }
    const std::optional<double> value = ParseDouble(record[0]);
    const std::optional<double> preference = ParseDouble(record[1]);
    if (!value || !preference) {
      return absl::InvalidArgumentError(
          absl::StrCat("NonNumericValue: ", path, " row ", row));
    }
    users.push_back({*value, *preference});
  }
  return Population::Create(std::move(users), path);
}

}  // namespace ldpmd
