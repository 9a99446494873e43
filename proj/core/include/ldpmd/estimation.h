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

// Aggregator side of bidirectional sampling: mergeable report counts and the
// unbiased estimators built on the per-direction frequencies
//
//   f_pos = #<1,1> / #<1,*>,   f_neg = #<0,1> / #<0,*>.
//
// Errors:
//   EmptyDirection     (kFailedPrecondition) no reports in one direction.
//   AllNullPopulation  (kOutOfRange) estimated responder fraction is ~0, so
//                      the missing-data mean is undefined.

#ifndef LDPMD_ESTIMATION_H_
#define LDPMD_ESTIMATION_H_

#include <cstdint>
#include <optional>
#include <span>

#include "absl/status/statusor.h"
#include "ldpmd/mechanisms.h"

namespace ldpmd {

// Exact integer counts; merging is field-wise addition.
struct DirectionCounts {
  uint64_t pos_total = 0;
  uint64_t pos_ones = 0;
  uint64_t neg_total = 0;
  uint64_t neg_ones = 0;
  uint64_t n = 0;

  void Add(const PerturbedReport& report);
  DirectionCounts& operator+=(const DirectionCounts& other);
  friend DirectionCounts operator+(DirectionCounts a,
                                   const DirectionCounts& b) {
    return a += b;
  }
  friend bool operator==(const DirectionCounts&,
                         const DirectionCounts&) = default;
};

DirectionCounts Accumulate(DirectionCounts counts,
                           const PerturbedReport& report);
DirectionCounts Merge(const DirectionCounts& a, const DirectionCounts& b);

// Counts over a report stream.
DirectionCounts CountReports(std::span<const PerturbedReport> reports);

// Real-valued counterpart of DirectionCounts holding expectations.
struct ExpectedCounts {
  double pos_total = 0.0;
  double pos_ones = 0.0;
  double neg_total = 0.0;
  double neg_ones = 0.0;
  double n = 0.0;
};

struct DirectionFrequencies {
  double f_pos = 0.0;
  double f_neg = 0.0;
  double n = 0.0;
};

absl::StatusOr<DirectionFrequencies> Frequencies(const DirectionCounts& c);
absl::StatusOr<DirectionFrequencies> Frequencies(const ExpectedCounts& c);

// Unbiased randomized-response correction (p - 1 + f_r) / (2p - 1).
double RrFrequencyAdjust(double f_r, const PrivacyBudget& budget);

// m* = (f_pos - f_neg) / (2p - 1); unbiased for the mean when nothing is null.
double MeanEstimateBasic(const DirectionFrequencies& f,
                         const PrivacyBudget& budget);

// s* = n (f_pos - f_neg) / (2p - 1); unbiased for the sum of non-null values.
double SumEstimate(const DirectionFrequencies& f, const PrivacyBudget& budget);

// f_null* = (1 - f_pos - f_neg) / (2p - 1); unbiased for the missing rate.
double MissingRateEstimate(const DirectionFrequencies& f,
                           const PrivacyBudget& budget);

inline constexpr double kDefaultNullTolerance = 1e-9;

// (f_pos - f_neg) / (f_pos + f_neg + 2p - 2) == s* / (n (1 - f_null*)).
// AllNullPopulation when |denominator| < tolerance.
absl::StatusOr<double> MeanEstimateMd(
    const DirectionFrequencies& f, const PrivacyBudget& budget,
    double tolerance = kDefaultNullTolerance);

// Count-based conveniences; propagate EmptyDirection.
absl::StatusOr<double> MeanEstimateBasic(const DirectionCounts& c,
                                         const PrivacyBudget& budget);
absl::StatusOr<double> SumEstimate(const DirectionCounts& c,
                                   const PrivacyBudget& budget);
absl::StatusOr<double> MissingRateEstimate(const DirectionCounts& c,
                                           const PrivacyBudget& budget);
absl::StatusOr<double> MeanEstimateMd(
    const DirectionCounts& c, const PrivacyBudget& budget,
    double tolerance = kDefaultNullTolerance);

// Per-report variance of the basic estimator, ((e^eps+1)/(e^eps-1))^2 - m^2.
// Var[m*] is this divided by n.
double TheoreticalVariance(const PrivacyBudget& budget, double m);

struct EstimateSummary {
  double f_pos = 0.0;
  double f_neg = 0.0;
  // Missing-data mean; absent when the population is estimated all-null.
  std::optional<double> m_star_raw;
  std::optional<double> m_star_clamped;
  // Mean under the no-null assumption.
  double m_basic = 0.0;
  double s_star = 0.0;
  double f_bot_raw = 0.0;
  double f_bot_clamped = 0.0;
  uint64_t n = 0;
};

absl::StatusOr<EstimateSummary> Summarize(
    const DirectionCounts& counts, const PrivacyBudget& budget,
    double tolerance = kDefaultNullTolerance);

// Exact expected counts of a population pushed through the two-bit sampler,
// from the closed-form channel. No sampling. InvalidArgument if empty.
absl::StatusOr<ExpectedCounts> ExpectedCountsOracle(
    std::span<const PreparedValue> population, const PrivacyBudget& budget);

}  // namespace ldpmd

#endif  // LDPMD_ESTIMATION_H_
