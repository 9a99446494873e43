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

// Synthetic and file-backed datasets, the privacy-preference model, fake
// answer behaviour of non-cooperating users, and ground-truth statistics.
//
// Every generator consumes a RandomStream passed by value, so a given
// (parameters, stream) pair always yields the same population.

#ifndef LDPMD_POPULATION_H_
#define LDPMD_POPULATION_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpmd/mechanisms.h"
#include "ldpmd/random.h"

namespace ldpmd {

struct UserRecord {
  double value = 0.0;       // in [-1, 1]
  double preference = 1.0;  // eps_u > 0

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

class Population {
 public:
  // InvalidArgument if empty or any record violates its invariants.
  static absl::StatusOr<Population> Create(std::vector<UserRecord> users,
                                           std::string provenance);

  const std::vector<UserRecord>& users() const { return users_; }
  const std::string& provenance() const { return provenance_; }
  size_t size() const { return users_.size(); }

 private:
  Population(std::vector<UserRecord> users, std::string provenance)
      : users_(std::move(users)), provenance_(std::move(provenance)) {}
  std::vector<UserRecord> users_;
  std::string provenance_;
};

// What a user does when the system budget exceeds their preference.
enum class BehaviorMode { kNullValue, kTop, kRnd };

absl::string_view BehaviorName(BehaviorMode mode);
absl::StatusOr<BehaviorMode> ParseBehavior(absl::string_view name);

struct GroundTruth {
  double missing_rate = 0.0;
  // Mean over users with eps <= eps_u; absent when everyone is missing.
  std::optional<double> responder_mean;
  // Mean over all users' true values.
  double overall_mean = 0.0;
  size_t n = 0;
};

// Gaussian draws clamped to [-1, 1].
std::vector<double> GenGauss(size_t n, double mu, double sigma,
                             RandomStream rng);

// Exponential(scale) draws, min-max normalized over the realized sample.
std::vector<double> GenExp(size_t n, double scale, RandomStream rng);

std::vector<double> GenUniform(size_t n, RandomStream rng);

struct ColumnOptions {
  char delimiter = ',';
  // Without a header row, `column` must be a zero-based index.
  bool has_header = true;
};

// Loads one numeric column and min-max normalizes it onto [-1, 1].
// Errors: FileNotFound (kNotFound), unknown column (kNotFound), EmptyColumn,
// NonNumericValue with its 1-based data row, ConstantColumn (all
// kInvalidArgument).
absl::StatusOr<std::vector<double>> LoadNumericColumn(
    const std::string& path, absl::string_view column,
    const ColumnOptions& options = {});

inline constexpr double kPreferenceFloor = 1e-6;

// Gaussian(mu, sigma) preferences, floored at kPreferenceFloor.
std::vector<double> GenPreferences(size_t n, double mu, double sigma,
                                   RandomStream rng);

// Fraction of preferences >= epsilon, i.e. users who answer truthfully.
double TruthRate(const std::vector<double>& preferences, double epsilon);

// Pairs values with preferences; InvalidArgument on length mismatch.
absl::StatusOr<Population> MakePopulation(const std::vector<double>& values,
                                          const std::vector<double>& preferences,
                                          std::string provenance);

// The value a user feeds the mechanism. Cooperative users (eps <= eps_u)
// submit their value under every mode; others submit Null, 1 or a uniform
// draw on [-1, 1].
PreparedValue ApplyBehavior(const UserRecord& user,
                            const PrivacyBudget& budget, BehaviorMode mode,
                            RandomStream& rng);

// Reassigns preferences so that a uniformly random floor(rate * n) subset is
// non-cooperative at `budget` (preference eps / 2) and everyone else is
// cooperative (preference 2 eps). Values are untouched.
absl::StatusOr<Population> ForceMissingRate(const Population& population,
                                            double rate,
                                            const PrivacyBudget& budget,
                                            RandomStream rng);

// Number of users floor(rate * n) made missing by ForceMissingRate.
size_t ForcedMissingCount(double rate, size_t n);

GroundTruth ComputeGroundTruth(const Population& population,
                               const PrivacyBudget& budget);

// Population files: header "value,preference", one user per line.
absl::Status WritePopulation(const Population& population,
                             const std::string& path);
absl::StatusOr<Population> ReadPopulation(const std::string& path);

}  // namespace ldpmd

#endif  // LDPMD_POPULATION_H_
