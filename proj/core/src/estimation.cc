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

#include "ldpmd/estimation.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ldpmd/channel.h"

namespace ldpmd {

namespace {

absl::Status EmptyDirectionError(double pos_total, double neg_total) {
  return absl::FailedPreconditionError(
      absl::StrCat("EmptyDirection: positive reports = ", pos_total,
                   ", negative reports = ", neg_total));
}

template <typename Counts>
absl::StatusOr<DirectionFrequencies> FrequenciesImpl(const Counts& c) {
  if (!(c.pos_total > 0) || !(c.neg_total > 0)) {
    return EmptyDirectionError(static_cast<double>(c.pos_total),
                               static_cast<double>(c.neg_total));
  }
  DirectionFrequencies f;
  f.f_pos = static_cast<double>(c.pos_ones) / static_cast<double>(c.pos_total);
  f.f_neg = static_cast<double>(c.neg_ones) / static_cast<double>(c.neg_total);
  f.n = static_cast<double>(c.n);
  return f;
}

// 2p - 1 == tanh(eps / 2).
double Gap(const PrivacyBudget& budget) {
  return std::tanh(0.5 * budget.epsilon());
}

}  // namespace

void DirectionCounts::Add(const PerturbedReport& report) {
  if (report.direction == SamplingDirection::kPositive) {
    ++pos_total;
    if (report.sample) ++pos_ones;
  } else {
    ++neg_total;
    if (report.sample) ++neg_ones;
  }
  ++n;
}

DirectionCounts& DirectionCounts::operator+=(const DirectionCounts& other) {
  pos_total += other.pos_total;
  pos_ones += other.pos_ones;
  neg_total += other.neg_total;
  neg_ones += other.neg_ones;
  n += other.n;
  return *this;
}

DirectionCounts Accumulate(DirectionCounts counts,
                           const PerturbedReport& report) {
  counts.Add(report);
  return counts;
}

DirectionCounts Merge(const DirectionCounts& a, const DirectionCounts& b) {
  return a + b;
}

DirectionCounts CountReports(std::span<const PerturbedReport> reports) {
  DirectionCounts counts;
  for (const PerturbedReport& r : reports) counts.Add(r);
  return counts;
}

absl::StatusOr<DirectionFrequencies> Frequencies(const DirectionCounts& c) {
  return FrequenciesImpl(c);
}

absl::StatusOr<DirectionFrequencies> Frequencies(const ExpectedCounts& c) {
  return FrequenciesImpl(c);
}

double RrFrequencyAdjust(double f_r, const PrivacyBudget& budget) {
  const double p = budget.p();
  return (p - 1.0 + f_r) / (2.0 * p - 1.0);
}

double MeanEstimateBasic(const DirectionFrequencies& f,
                         const PrivacyBudget& budget) {
  return (f.f_pos - f.f_neg) / Gap(budget);
}

double SumEstimate(const DirectionFrequencies& f, const PrivacyBudget& budget) {
  return f.n * (f.f_pos - f.f_neg) / Gap(budget);
}

double MissingRateEstimate(const DirectionFrequencies& f,
                           const PrivacyBudget& budget) {
  return (1.0 - f.f_pos - f.f_neg) / Gap(budget);
}

absl::StatusOr<double> MeanEstimateMd(const DirectionFrequencies& f,
                                      const PrivacyBudget& budget,
                                      double tolerance) {
  // 2p - 2 == -2q.
  const double denominator = f.f_pos + f.f_neg - 2.0 * budget.q();
  if (!(std::abs(denominator) >= tolerance)) {
    return absl::OutOfRangeError(absl::StrCat(
        "AllNullPopulation: estimated responder fraction denominator ",
        denominator, " is below tolerance ", tolerance));
  }
  return (f.f_pos - f.f_neg) / denominator;
}

absl::StatusOr<double> MeanEstimateBasic(const DirectionCounts& c,
                                         const PrivacyBudget& budget) {
  absl::StatusOr<DirectionFrequencies> f = Frequencies(c);
  if (!f.ok()) return f.status();
  return MeanEstimateBasic(*f, budget);
}

absl::StatusOr<double> SumEstimate(const DirectionCounts& c,
                                   const PrivacyBudget& budget) {
  absl::StatusOr<DirectionFrequencies> f = Frequencies(c);
  if (!f.ok()) return f.status();
  return SumEstimate(*f, budget);
}

absl::StatusOr<double> MissingRateEstimate(const DirectionCounts& c,
                                           const PrivacyBudget& budget) {
  absl::StatusOr<DirectionFrequencies> f = Frequencies(c);
  if (!f.ok()) return f.status();
  return MissingRateEstimate(*f, budget);
}

absl::StatusOr<double> MeanEstimateMd(const DirectionCounts& c,
                                      const PrivacyBudget& budget,
                                      double tolerance) {
  absl::StatusOr<DirectionFrequencies> f = Frequencies(c);
  if (!f.ok()) return f.status();
  return MeanEstimateMd(*f, budget, tolerance);
}

double TheoreticalVariance(const PrivacyBudget& budget, double m) {
  const double c = budget.harmony_scale();
  return c * c - m * m;
}

absl::StatusOr<EstimateSummary> Summarize(const DirectionCounts& counts,
                                          const PrivacyBudget& budget,
                                          double tolerance) {
  absl::StatusOr<DirectionFrequencies> f = Frequencies(counts);
  if (!f.ok()) return f.status();
  EstimateSummary summary;
  summary.f_pos = f->f_pos;
  summary.f_neg = f->f_neg;
  summary.n = counts.n;
  summary.m_basic = MeanEstimateBasic(*f, budget);
  summary.s_star = SumEstimate(*f, budget);
  summary.f_bot_raw = MissingRateEstimate(*f, budget);
  summary.f_bot_clamped = std::clamp(summary.f_bot_raw, 0.0, 1.0);
  if (absl::StatusOr<double> m = MeanEstimateMd(*f, budget, tolerance);
      m.ok()) {
    summary.m_star_raw = *m;
    summary.m_star_clamped = std::clamp(*m, -1.0, 1.0);
  }
  return summary;
}

absl::StatusOr<ExpectedCounts> ExpectedCountsOracle(
    std::span<const PreparedValue> population, const PrivacyBudget& budget) {
  if (population.empty()) {
    return absl::InvalidArgumentError("population is empty");
  }
  ExpectedCounts expected;
  for (const PreparedValue& value : population) {
    expected.pos_total += 0.5;
    expected.neg_total += 0.5;
    expected.pos_ones +=
        0.5 * SampleBitProbability(SamplingDirection::kPositive, value, budget);
    expected.neg_ones +=
        0.5 * SampleBitProbability(SamplingDirection::kNegative, value, budget);
    expected.n += 1.0;
  }
  return expected;
}

}  // namespace ldpmd
