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

// Local perturbation primitives. Every mechanism is a pure function of its
// input, the privacy budget and an explicit RandomStream; there is no global
// random state. Values must already be normalized into [-1, 1]; out-of-range
// inputs are rejected with kInvalidArgument rather than clamped.

#ifndef LDPMD_MECHANISMS_H_
#define LDPMD_MECHANISMS_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "ldpmd/random.h"

namespace ldpmd {

// A positive, finite epsilon (nats). The randomized-response probability
// p = e^eps / (e^eps + 1) is always derived from epsilon on demand.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon);

  double epsilon() const { return epsilon_; }
  // e^eps / (e^eps + 1).
  double p() const;
  // 1 / (e^eps + 1), i.e. 1 - p without cancellation.
  double q() const;
  // (e^eps + 1) / (e^eps - 1) == 1 / (2p - 1).
  double harmony_scale() const;
  // (e^{eps/2} + 1) / (e^{eps/2} - 1), the piecewise mechanism's bound.
  double piecewise_scale() const;

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {}
  double epsilon_;
};

enum class SamplingDirection : uint8_t { kNegative = 0, kPositive = 1 };

// The two-bit report <s, b>.
struct PerturbedReport {
  SamplingDirection direction = SamplingDirection::kNegative;
  bool sample = false;

  friend bool operator==(const PerturbedReport&,
                         const PerturbedReport&) = default;
};

// A value after the prepare-value gate: a real in [-1, 1] or null.
class PreparedValue {
 public:
  static absl::StatusOr<PreparedValue> Real(double value);
  static PreparedValue Null() { return PreparedValue(std::nullopt); }

  bool is_null() const { return !value_.has_value(); }
  // Requires !is_null().
  double value() const { return *value_; }

  friend bool operator==(const PreparedValue&, const PreparedValue&) = default;

 private:
  explicit PreparedValue(std::optional<double> value) : value_(value) {}
  std::optional<double> value_;
};

// An input domain [lower, upper] with lower < upper.
class ValueDomain {
 public:
  static absl::StatusOr<ValueDomain> Create(double lower, double upper);

  double lower() const { return lower_; }
  double upper() const { return upper_; }

  // Maps [lower, upper] onto [-1, 1].
  double Normalize(double v) const;

 private:
  ValueDomain(double lower, double upper) : lower_(lower), upper_(upper) {}
  double lower_;
  double upper_;
};

// Returns `answer` with probability p, its negation otherwise.
bool RandomizedResponse(bool answer, const PrivacyBudget& budget,
                        RandomStream& rng);

// Dis(v): -1 with probability (1 - v) / 2, +1 with probability (1 + v) / 2.
absl::StatusOr<int> Discretize(double v, RandomStream& rng);

// Harmony: discretize, randomized response, then scale to +-harmony_scale().
absl::StatusOr<double> HarmonyPerturb(double v, const PrivacyBudget& budget,
                                      RandomStream& rng);

// Piecewise mechanism. Construction follows Wang et al. (ICDE 2019); only the
// output range [-C', C'] with C' = piecewise_scale() is fixed by the
// mean-estimation setting here. With probability e^{eps/2} / (e^{eps/2} + 1)
// the output is uniform on [l(v), r(v)], otherwise uniform on the rest of
// [-C', C'], where l(v) = (C' + 1) / 2 * v - (C' - 1) / 2 and
// r(v) = l(v) + C' - 1.
absl::StatusOr<double> PiecewisePerturb(double v, const PrivacyBudget& budget,
                                        RandomStream& rng);

// Left end l(v) of the piecewise mechanism's high-probability interval.
double PiecewiseCenterLeft(double v, const PrivacyBudget& budget);

// Bidirectional sampling. The direction is uniform; under positive sampling
// b = 1 with probability (2p - 1) Pr[Dis(v) = 1] + (1 - p), under negative
// sampling with (2p - 1) Pr[Dis(v) = -1] + (1 - p).
absl::StatusOr<PerturbedReport> BiSamplePerturb(double v,
                                                const PrivacyBudget& budget,
                                                RandomStream& rng);

// Prepare-value gate: Real(v) when budget.epsilon() <= user_budget, Null
// otherwise. Fails only on precondition violations (v outside [-1, 1] or a
// non-positive user budget).
absl::StatusOr<PreparedValue> PrepareValue(double v, double user_budget,
                                           const PrivacyBudget& budget);

// Bidirectional sampling for prepared values. Real inputs behave exactly as
// BiSamplePerturb; Null samples b = 1 with probability 1 / (e^eps + 1) in
// either direction.
PerturbedReport BiSampleMdPerturb(const PreparedValue& value,
                                  const PrivacyBudget& budget,
                                  RandomStream& rng);

// Maps a mean estimated on [-1, 1] back onto `domain`.
double RescaleMean(double unit_mean, const ValueDomain& domain);

}  // namespace ldpmd

#endif  // LDPMD_MECHANISMS_H_
