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

#include "ldpmd/privkvm.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldpmd {

absl::StatusOr<PrivKvmConfig> PrivKvmConfig::Create(const PrivacyBudget& total,
                                                    int real_iterations,
                                                    int virtual_iterations,
                                                    double key_fraction) {
  if (real_iterations != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "only one real iteration is supported, got ", real_iterations));
  }
  if (virtual_iterations < 0) {
    return absl::InvalidArgumentError("virtual_iterations must be >= 0");
  }
  if (!(key_fraction > 0.0 && key_fraction < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("key_fraction must be in (0, 1), got ", key_fraction));
  }
  absl::StatusOr<PrivacyBudget> key =
      PrivacyBudget::Create(key_fraction * total.epsilon());
  absl::StatusOr<PrivacyBudget> value =
      PrivacyBudget::Create(total.epsilon() - key_fraction * total.epsilon());
  if (!key.ok()) return key.status();
  if (!value.ok()) return value.status();
  return PrivKvmConfig(total, *key, *value, real_iterations,
                       virtual_iterations);
}

KvPair KvEncode(const PreparedValue& value) {
  if (value.is_null()) return {false, 0.0};
  return {true, value.value()};
}

absl::StatusOr<KvPair> PrivKvmPerturb(const KvPair& pair,
                                      const PrivKvmConfig& config,
                                      RandomStream& rng) {
  const bool keep_key = rng.Bernoulli(config.key_budget().p());
  if (pair.key) {
    absl::StatusOr<int> sign = Discretize(pair.value, rng);
    if (!sign.ok()) return sign.status();
    if (!keep_key) return KvPair{false, 0.0};
    const bool positive =
        RandomizedResponse(*sign > 0, config.value_budget(), rng);
    return KvPair{true, positive ? 1.0 : -1.0};
  }
  if (keep_key) return KvPair{false, 0.0};
  const bool positive = rng.Bernoulli(0.5);
  return KvPair{true, positive ? 1.0 : -1.0};
}

void KvCounts::Add(const KvPair& report) {
  if (!report.key) {
    ++key_zero;
  } else if (report.value > 0) {
    ++plus;
  } else {
    ++minus;
  }
}

KvCounts& KvCounts::operator+=(const KvCounts& other) {
  key_zero += other.key_zero;
  plus += other.plus;
  minus += other.minus;
  return *this;
}

double PrivKvmKeyFrequency(const KvCounts& counts,
                           const PrivKvmConfig& config) {
  const double n = static_cast<double>(counts.n());
  const double p1 = config.key_budget().p();
  const double observed = static_cast<double>(counts.plus + counts.minus) / n;
  return (p1 - 1.0 + observed) / (2.0 * p1 - 1.0);
}

absl::StatusOr<KvmEstimate> PrivKvmEstimate(const KvCounts& counts,
                                            const PrivKvmConfig& config) {
  const double n = static_cast<double>(counts.n());
  if (n == 0) return absl::InvalidArgumentError("no PrivKVM reports");
  const double q1 = config.key_budget().q();
  const double p2 = config.value_budget().p();

  const double key_ones = static_cast<double>(counts.plus + counts.minus);
  KvmEstimate estimate;
  estimate.key_frequency = PrivKvmKeyFrequency(counts, config);
  estimate.missing_rate = 1.0 - estimate.key_frequency;
  if (!(estimate.key_frequency > 0.0) || key_ones == 0) {
    return absl::OutOfRangeError(
        absl::StrCat("DegenerateFrequency: adjusted key frequency ",
                     estimate.key_frequency, " leaves the mean undefined"));
  }

  // Value RR calibration among key-1 reports.
  double n_plus = std::clamp(
      (static_cast<double>(counts.plus) - key_ones * (1.0 - p2)) /
          (2.0 * p2 - 1.0),
      0.0, key_ones);
  double n_minus = key_ones - n_plus;
  const double fakes = std::clamp(n * (1.0 - estimate.key_frequency) * q1, 0.0,
                                  key_ones);

  double mean = (n_plus - n_minus) / key_ones;
  double fake_centre = 0.0;
  estimate.mean_trace.push_back(mean);
  for (int t = 0; t < config.virtual_iterations(); ++t) {
    const double shift = 0.5 * fakes * (mean - fake_centre);
    n_plus = std::clamp(n_plus + shift, 0.0, key_ones);
    n_minus = key_ones - n_plus;
    fake_centre = mean;
    mean = std::clamp((n_plus - n_minus) / key_ones, -1.0, 1.0);
    estimate.mean_trace.push_back(mean);
  }
  estimate.mean = mean;
  return estimate;
}

absl::StatusOr<KvmEstimate> PrivKvmEstimate(std::span<const KvPair> reports,
                                            const PrivKvmConfig& config) {
  KvCounts counts;
  for (const KvPair& r : reports) counts.Add(r);
  return PrivKvmEstimate(counts, config);
}

}  // namespace ldpmd
