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

#include "ldpmd/mechanisms.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldpmd {

namespace {

absl::Status CheckUnitInterval(double v) {
  if (!(v >= -1.0 && v <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("value ", v, " is outside [-1, 1]"));
  }
  return absl::OkStatus();
}

// Pr[b = 1] under positive sampling, written as a convex combination of p and
// 1 - p so that both endpoints are exact at any epsilon.
double PositiveBitProbability(double v, const PrivacyBudget& budget) {
  return 0.5 * (1.0 + v) * budget.p() + 0.5 * (1.0 - v) * budget.q();
}

double NegativeBitProbability(double v, const PrivacyBudget& budget) {
  return PositiveBitProbability(-v, budget);
}

PerturbedReport SampleReport(double v, const PrivacyBudget& budget,
                             RandomStream& rng) {
  PerturbedReport report;
  if (rng.Bernoulli(0.5)) {
    report.direction = SamplingDirection::kPositive;
    report.sample = rng.Bernoulli(PositiveBitProbability(v, budget));
  } else {
    report.direction = SamplingDirection::kNegative;
    report.sample = rng.Bernoulli(NegativeBitProbability(v, budget));
  }
  return report;
}

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  return PrivacyBudget(epsilon);
}

double PrivacyBudget::p() const { return 1.0 / (1.0 + std::exp(-epsilon_)); }

double PrivacyBudget::q() const { return 1.0 / (std::exp(epsilon_) + 1.0); }

double PrivacyBudget::harmony_scale() const {
  return 1.0 / std::tanh(0.5 * epsilon_);
}

double PrivacyBudget::piecewise_scale() const {
  return 1.0 / std::tanh(0.25 * epsilon_);
}

absl::StatusOr<PreparedValue> PreparedValue::Real(double value) {
  if (absl::Status s = CheckUnitInterval(value); !s.ok()) return s;
  return PreparedValue(value);
}

absl::StatusOr<ValueDomain> ValueDomain::Create(double lower, double upper) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid domain [", lower, ", ", upper, "]"));
  }
  return ValueDomain(lower, upper);
}

double ValueDomain::Normalize(double v) const {
  return 2.0 / (upper_ - lower_) * v + (lower_ + upper_) / (lower_ - upper_);
}

bool RandomizedResponse(bool answer, const PrivacyBudget& budget,
                        RandomStream& rng) {
  return rng.Bernoulli(budget.p()) ? answer : !answer;
}

absl::StatusOr<int> Discretize(double v, RandomStream& rng) {
  if (absl::Status s = CheckUnitInterval(v); !s.ok()) return s;
  return rng.Bernoulli(0.5 * (1.0 + v)) ? 1 : -1;
}

absl::StatusOr<double> HarmonyPerturb(double v, const PrivacyBudget& budget,
                                      RandomStream& rng) {
  absl::StatusOr<int> discrete = Discretize(v, rng);
  if (!discrete.ok()) return discrete.status();
  const bool positive = RandomizedResponse(*discrete > 0, budget, rng);
  const double scale = budget.harmony_scale();
  return positive ? scale : -scale;
}

double PiecewiseCenterLeft(double v, const PrivacyBudget& budget) {
  const double c = budget.piecewise_scale();
  return 0.5 * (c + 1.0) * v - 0.5 * (c - 1.0);
}

absl::StatusOr<double> PiecewisePerturb(double v, const PrivacyBudget& budget,
                                        RandomStream& rng) {
  if (absl::Status s = CheckUnitInterval(v); !s.ok()) return s;
  const double c = budget.piecewise_scale();
  const double left = PiecewiseCenterLeft(v, budget);
  const double half = std::exp(0.5 * budget.epsilon());
  if (rng.Bernoulli(half / (half + 1.0))) {
    return left + (c - 1.0) * rng.Uniform01();
  }
  // The tails [-C', l) and (r, C'] have total length C' + 1; draw along their
  // concatenation and jump over the centre interval.
  double x = -c + (c + 1.0) * rng.Uniform01();
  if (x >= left) x += c - 1.0;
  return x;
}

absl::StatusOr<PerturbedReport> BiSamplePerturb(double v,
                                                const PrivacyBudget& budget,
                                                RandomStream& rng) {
  if (absl::Status s = CheckUnitInterval(v); !s.ok()) return s;
  return SampleReport(v, budget, rng);
}

absl::StatusOr<PreparedValue> PrepareValue(double v, double user_budget,
                                           const PrivacyBudget& budget) {
  if (!(user_budget > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("user budget must be positive, got ", user_budget));
  }
  absl::StatusOr<PreparedValue> real = PreparedValue::Real(v);
  if (!real.ok()) return real.status();
  if (budget.epsilon() <= user_budget) return *real;
  return PreparedValue::Null();
}

PerturbedReport BiSampleMdPerturb(const PreparedValue& value,
                                  const PrivacyBudget& budget,
                                  RandomStream& rng) {
  if (!value.is_null()) return SampleReport(value.value(), budget, rng);
  PerturbedReport report;
  report.direction = rng.Bernoulli(0.5) ? SamplingDirection::kPositive
                                        : SamplingDirection::kNegative;
  report.sample = rng.Bernoulli(budget.q());
  return report;
}

double RescaleMean(double unit_mean, const ValueDomain& domain) {
  return 0.5 * (domain.upper() - domain.lower()) * unit_mean +
         0.5 * (domain.upper() + domain.lower());
}

}  // namespace ldpmd
