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

// Analytic LDP audits. A ChannelMatrix tabulates Pr[output | input] for a
// mechanism over an input grid; AuditEpsilon reports the largest log ratio
//
//   max_{o, t1, t2} ln Pr[M(t1) = o] - ln Pr[M(t2) = o]
//
// together with the witness attaining it. Continuous outputs (piecewise
// mechanism) are discretized into equal-width bins over [-C', C'].

#ifndef LDPMD_AUDIT_H_
#define LDPMD_AUDIT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpmd/mechanisms.h"

namespace ldpmd {

enum class Mechanism {
  kRandomizedResponse,
  kHarmony,
  kPiecewise,
  kBiSample,
  kBiSampleMd,
  kPrivKvm,
};

// Canonical identifiers: RR, Harmony, PM, BiSample, BiSampleMD, PrivKVM.
absl::string_view MechanismName(Mechanism mechanism);
absl::StatusOr<Mechanism> ParseMechanism(absl::string_view name);
// Mechanisms whose input domain includes null.
bool IsNullAware(Mechanism mechanism);

struct ChannelOptions {
  int piecewise_bins = 64;
  // Fraction of the total budget spent on the PrivKVM key.
  double privkvm_key_fraction = 0.5;
};

struct ChannelMatrix {
  Mechanism mechanism = Mechanism::kBiSample;
  double epsilon = 0.0;
  std::vector<PreparedValue> inputs;
  std::vector<std::string> outputs;
  // probs[i][j] = Pr[output j | input i].
  std::vector<std::vector<double>> probs;

  std::string InputLabel(size_t row) const;
};

// Exact probabilities from the closed forms; no sampling.
// UnsupportedInput (kInvalidArgument) for null on a non-null-aware mechanism,
// or a non-bit input to RR.
absl::StatusOr<ChannelMatrix> ComputeChannelMatrix(
    Mechanism mechanism, const PrivacyBudget& budget,
    std::span<const PreparedValue> grid, const ChannelOptions& options = {});

// `points` evenly spaced inputs on [-1, 1] (endpoints included), plus null
// for null-aware mechanisms. RR gets {0, 1}.
std::vector<PreparedValue> DefaultAuditGrid(Mechanism mechanism,
                                            int points = 201);

struct AuditReport {
  Mechanism mechanism = Mechanism::kBiSample;
  double epsilon_claimed = 0.0;
  double epsilon_observed = 0.0;
  // Witness: ratio Pr[o | inputs[numerator_row]] / Pr[o | inputs[denominator_row]].
  std::string witness_numerator;
  std::string witness_denominator;
  std::string witness_output;
};

// ZeroProbability (kFailedPrecondition) if any entry is zero, since pure
// epsilon is then unbounded.
absl::StatusOr<AuditReport> AuditEpsilon(const ChannelMatrix& matrix);

// Empirical output distribution of the real implementation over `draws`
// invocations, indexed like ComputeChannelMatrix's outputs.
absl::StatusOr<std::vector<double>> MonteCarloChannel(
    Mechanism mechanism, const PrivacyBudget& budget,
    const PreparedValue& input, uint64_t draws, uint64_t seed,
    const ChannelOptions& options = {});

// Audit of the piecewise mechanism from binned Monte Carlo frequencies
// (one MonteCarloChannel per grid input). The result's epsilon_observed is
// the empirical max log ratio; callers compare it against
// eps + ln(slack) with kPiecewiseAuditSlack.
inline constexpr double kPiecewiseAuditSlack = 1.05;
absl::StatusOr<AuditReport> AuditPiecewiseMonteCarlo(
    const PrivacyBudget& budget, std::span<const PreparedValue> grid,
    uint64_t draws, uint64_t seed, const ChannelOptions& options = {});

// "mechanism,epsilon_claimed,epsilon_observed,witness_t1,witness_t2,witness_output"
std::string AuditCsvHeader();
std::string FormatAuditCsvRecord(const AuditReport& report);
std::string FormatAuditText(const AuditReport& report);

}  // namespace ldpmd

#endif  // LDPMD_AUDIT_H_
