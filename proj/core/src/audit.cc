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

#include "ldpmd/audit.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "ldpmd/channel.h"
#include "ldpmd/csv.h"
#include "ldpmd/privkvm.h"
#include "ldpmd/random.h"

namespace ldpmd {

namespace {

constexpr PerturbedReport kReports[] = {
    {SamplingDirection::kNegative, false},
    {SamplingDirection::kNegative, true},
    {SamplingDirection::kPositive, false},
    {SamplingDirection::kPositive, true},
};

absl::Status UnsupportedInput(Mechanism mechanism, const PreparedValue& input) {
  return absl::InvalidArgumentError(absl::StrCat(
      "UnsupportedInput: ", MechanismName(mechanism), " does not accept ",
      input.is_null() ? std::string("null") : FormatDouble(input.value())));
}

absl::Status CheckInput(Mechanism mechanism, const PreparedValue& input) {
  if (input.is_null() && !IsNullAware(mechanism)) {
    return UnsupportedInput(mechanism, input);
  }
  if (mechanism == Mechanism::kRandomizedResponse &&
      input.value() != 0.0 && input.value() != 1.0) {
    return UnsupportedInput(mechanism, input);
  }
  return absl::OkStatus();
}

std::vector<std::string> OutputLabels(Mechanism mechanism,
                                      const PrivacyBudget& budget,
                                      const ChannelOptions& options) {
  switch (mechanism) {
    case Mechanism::kRandomizedResponse:
      return {"0", "1"};
    case Mechanism::kHarmony:
      return {"-C", "+C"};
    case Mechanism::kBiSample:
    case Mechanism::kBiSampleMd:
      return {"<0,0>", "<0,1>", "<1,0>", "<1,1>"};
    case Mechanism::kPrivKvm:
      return {"<0,->", "<1,-1>", "<1,+1>"};
    case Mechanism::kPiecewise: {
      std::vector<std::string> labels;
      const double c = budget.piecewise_scale();
      const double width = 2.0 * c / options.piecewise_bins;
      for (int b = 0; b < options.piecewise_bins; ++b) {
        labels.push_back(absl::StrCat("[", FormatDouble(-c + b * width), ",",
                                      FormatDouble(-c + (b + 1) * width),
                                      ")"));
      }
      return labels;
    }
  }
  return {};
}

// Exact mass the piecewise density puts on each bin: a low density on all of
// [-C', C'] plus the excess of the high density over [l(v), r(v)].
std::vector<double> PiecewiseBinProbabilities(double v,
                                              const PrivacyBudget& budget,
                                              int bins) {
  const double c = budget.piecewise_scale();
  const double half = std::exp(0.5 * budget.epsilon());
  const double left = PiecewiseCenterLeft(v, budget);
  const double right = left + c - 1.0;
  const double high = half / ((half + 1.0) * (c - 1.0));
  const double low = 1.0 / ((half + 1.0) * (c + 1.0));
  const double width = 2.0 * c / bins;
  std::vector<double> probs(bins);
  for (int b = 0; b < bins; ++b) {
    const double a = -c + b * width;
    const double z = (b + 1 == bins) ? c : a + width;
    const double overlap = std::max(0.0, std::min(z, right) - std::max(a, left));
    probs[b] = low * (z - a) + (high - low) * overlap;
  }
  return probs;
}

std::vector<double> ChannelRow(Mechanism mechanism, const PrivacyBudget& budget,
                               const PreparedValue& input,
                               const PrivKvmConfig& kvm,
                               const ChannelOptions& options) {
  const double e = std::exp(budget.epsilon());
  switch (mechanism) {
    case Mechanism::kRandomizedResponse: {
      const double truthful = e / (e + 1.0);
      const double one = input.value() == 1.0 ? truthful : 1.0 - truthful;
      return {1.0 - one, one};
    }
    case Mechanism::kHarmony: {
      const double dis_plus = (1.0 + input.value()) / 2.0;
      const double plus =
          dis_plus * e / (e + 1.0) + (1.0 - dis_plus) / (e + 1.0);
      return {1.0 - plus, plus};
    }
    case Mechanism::kPiecewise:
      return PiecewiseBinProbabilities(input.value(), budget,
                                       options.piecewise_bins);
    case Mechanism::kBiSample:
    case Mechanism::kBiSampleMd: {
      std::vector<double> row;
      for (const PerturbedReport& r : kReports) {
        row.push_back(ReportProbability(r, input, budget));
      }
      return row;
    }
    case Mechanism::kPrivKvm: {
      const double e1 = std::exp(kvm.key_budget().epsilon());
      const double e2 = std::exp(kvm.value_budget().epsilon());
      const double keep = e1 / (e1 + 1.0);
      const double flip = 1.0 / (e1 + 1.0);
      if (input.is_null()) return {keep, 0.5 * flip, 0.5 * flip};
      const double dis_plus = (1.0 + input.value()) / 2.0;
      const double plus =
          dis_plus * e2 / (e2 + 1.0) + (1.0 - dis_plus) / (e2 + 1.0);
      return {flip, keep * (1.0 - plus), keep * plus};
    }
  }
  return {};
}

size_t OutputIndexOfPiecewise(double x, const PrivacyBudget& budget, int bins) {
  const double c = budget.piecewise_scale();
  const double position = (x + c) / (2.0 * c) * bins;
  return static_cast<size_t>(
      std::clamp(static_cast<int>(std::floor(position)), 0, bins - 1));
}

}  // namespace

absl::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kRandomizedResponse:
      return "RR";
    case Mechanism::kHarmony:
      return "Harmony";
    case Mechanism::kPiecewise:
      return "PM";
    case Mechanism::kBiSample:
      return "BiSample";
    case Mechanism::kBiSampleMd:
      return "BiSampleMD";
    case Mechanism::kPrivKvm:
      return "PrivKVM";
  }
  return "unknown";
}

absl::StatusOr<Mechanism> ParseMechanism(absl::string_view name) {
  for (Mechanism m :
       {Mechanism::kRandomizedResponse, Mechanism::kHarmony,
        Mechanism::kPiecewise, Mechanism::kBiSample, Mechanism::kBiSampleMd,
        Mechanism::kPrivKvm}) {
    if (name == MechanismName(m)) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown mechanism '", name,
      "' (expected RR|Harmony|PM|BiSample|BiSampleMD|PrivKVM)"));
}

bool IsNullAware(Mechanism mechanism) {
  return mechanism == Mechanism::kBiSampleMd ||
         mechanism == Mechanism::kPrivKvm;
}

std::string ChannelMatrix::InputLabel(size_t row) const {
  const PreparedValue& input = inputs[row];
  return input.is_null() ? "null" : FormatDouble(input.value());
}

absl::StatusOr<ChannelMatrix> ComputeChannelMatrix(
    Mechanism mechanism, const PrivacyBudget& budget,
    std::span<const PreparedValue> grid, const ChannelOptions& options) {
  if (grid.empty()) return absl::InvalidArgumentError("input grid is empty");
  if (options.piecewise_bins < 1) {
    return absl::InvalidArgumentError("piecewise_bins must be positive");
  }
  absl::StatusOr<PrivKvmConfig> kvm = PrivKvmConfig::Create(
      budget, 1, 0, options.privkvm_key_fraction);
  if (!kvm.ok()) return kvm.status();

  ChannelMatrix matrix;
  matrix.mechanism = mechanism;
  matrix.epsilon = budget.epsilon();
  matrix.outputs = OutputLabels(mechanism, budget, options);
  for (const PreparedValue& input : grid) {
    if (absl::Status s = CheckInput(mechanism, input); !s.ok()) return s;
    matrix.inputs.push_back(input);
    matrix.probs.push_back(ChannelRow(mechanism, budget, input, *kvm, options));
  }
  return matrix;
}

std::vector<PreparedValue> DefaultAuditGrid(Mechanism mechanism, int points) {
  std::vector<PreparedValue> grid;
  if (mechanism == Mechanism::kRandomizedResponse) {
    grid.push_back(*PreparedValue::Real(0.0));
    grid.push_back(*PreparedValue::Real(1.0));
    return grid;
  }
  if (points == 1) {
    grid.push_back(*PreparedValue::Real(0.0));
  } else {
    for (int i = 0; i < points; ++i) {
      // Endpoints are set exactly rather than accumulated.
      const double v = i == points - 1 ? 1.0 : -1.0 + 2.0 * i / (points - 1);
      grid.push_back(*PreparedValue::Real(v));
    }
  }
  if (IsNullAware(mechanism)) grid.push_back(PreparedValue::Null());
  return grid;
}

absl::StatusOr<AuditReport> AuditEpsilon(const ChannelMatrix& matrix) {
  if (matrix.inputs.empty() || matrix.outputs.empty()) {
    return absl::InvalidArgumentError("empty channel matrix");
  }
  AuditReport report;
  report.mechanism = matrix.mechanism;
  report.epsilon_claimed = matrix.epsilon;
  report.epsilon_observed = -1.0;
  for (size_t j = 0; j < matrix.outputs.size(); ++j) {
    size_t hi = 0;
    size_t lo = 0;
    for (size_t i = 0; i < matrix.inputs.size(); ++i) {
      const double prob = matrix.probs[i][j];
      if (!(prob > 0.0)) {
        return absl::FailedPreconditionError(absl::StrCat(
            "ZeroProbability: Pr[", matrix.outputs[j], " | ",
            matrix.InputLabel(i), "] = ", prob));
      }
      if (prob > matrix.probs[hi][j]) hi = i;
      if (prob < matrix.probs[lo][j]) lo = i;
    }
    const double log_ratio =
        std::log(matrix.probs[hi][j]) - std::log(matrix.probs[lo][j]);
    if (log_ratio > report.epsilon_observed) {
      report.epsilon_observed = log_ratio;
      report.witness_numerator = matrix.InputLabel(hi);
      report.witness_denominator = matrix.InputLabel(lo);
      report.witness_output = matrix.outputs[j];
    }
  }
  return report;
}

absl::StatusOr<std::vector<double>> MonteCarloChannel(
    Mechanism mechanism, const PrivacyBudget& budget,
    const PreparedValue& input, uint64_t draws, uint64_t seed,
    const ChannelOptions& options) {
  if (draws < 1) return absl::InvalidArgumentError("draws must be >= 1");
  if (absl::Status s = CheckInput(mechanism, input); !s.ok()) return s;
  absl::StatusOr<PrivKvmConfig> kvm = PrivKvmConfig::Create(
      budget, 1, 0, options.privkvm_key_fraction);
  if (!kvm.ok()) return kvm.status();

  const size_t width = OutputLabels(mechanism, budget, options).size();
  std::vector<uint64_t> counts(width, 0);
  RandomStream rng(seed);
  for (uint64_t d = 0; d < draws; ++d) {
    size_t index = 0;
    switch (mechanism) {
      case Mechanism::kRandomizedResponse:
        index = RandomizedResponse(input.value() == 1.0, budget, rng) ? 1 : 0;
        break;
      case Mechanism::kHarmony: {
        absl::StatusOr<double> out = HarmonyPerturb(input.value(), budget, rng);
        if (!out.ok()) return out.status();
        index = *out > 0 ? 1 : 0;
        break;
      }
      case Mechanism::kPiecewise: {
        absl::StatusOr<double> out =
            PiecewisePerturb(input.value(), budget, rng);
        if (!out.ok()) return out.status();
        index = OutputIndexOfPiecewise(*out, budget, options.piecewise_bins);
        break;
      }
      case Mechanism::kBiSample: {
        absl::StatusOr<PerturbedReport> out =
            BiSamplePerturb(input.value(), budget, rng);
        if (!out.ok()) return out.status();
        index = 2 * static_cast<size_t>(out->direction) + (out->sample ? 1 : 0);
        break;
      }
      case Mechanism::kBiSampleMd: {
        const PerturbedReport out = BiSampleMdPerturb(input, budget, rng);
        index = 2 * static_cast<size_t>(out.direction) + (out.sample ? 1 : 0);
        break;
      }
      case Mechanism::kPrivKvm: {
        absl::StatusOr<KvPair> out = PrivKvmPerturb(KvEncode(input), *kvm, rng);
        if (!out.ok()) return out.status();
        index = !out->key ? 0 : (out->value > 0 ? 2 : 1);
        break;
      }
    }
    ++counts[index];
  }
  std::vector<double> frequencies(width);
  for (size_t j = 0; j < width; ++j) {
    frequencies[j] = static_cast<double>(counts[j]) / static_cast<double>(draws);
  }
  return frequencies;
}

absl::StatusOr<AuditReport> AuditPiecewiseMonteCarlo(
    const PrivacyBudget& budget, std::span<const PreparedValue> grid,
    uint64_t draws, uint64_t seed, const ChannelOptions& options) {
  if (grid.empty()) return absl::InvalidArgumentError("input grid is empty");
  ChannelMatrix matrix;
  matrix.mechanism = Mechanism::kPiecewise;
  matrix.epsilon = budget.epsilon();
  matrix.outputs = OutputLabels(Mechanism::kPiecewise, budget, options);
  RandomStream seeds(seed);
  for (size_t i = 0; i < grid.size(); ++i) {
    absl::StatusOr<std::vector<double>> row =
        MonteCarloChannel(Mechanism::kPiecewise, budget, grid[i], draws,
                          seeds.Fork(i).NextU64(), options);
    if (!row.ok()) return row.status();
    matrix.inputs.push_back(grid[i]);
    matrix.probs.push_back(*std::move(row));
  }
  return AuditEpsilon(matrix);
}

std::string AuditCsvHeader() {
  return "mechanism,epsilon_claimed,epsilon_observed,witness_t1,witness_t2,"
         "witness_output";
}

std::string FormatAuditCsvRecord(const AuditReport& report) {
  return absl::StrCat(MechanismName(report.mechanism), ",",
                      FormatDouble(report.epsilon_claimed), ",",
                      FormatDouble(report.epsilon_observed), ",",
                      report.witness_numerator, ",", report.witness_denominator,
                      ",\"", report.witness_output, "\"");
}

std::string FormatAuditText(const AuditReport& report) {
  return absl::StrCat(
      MechanismName(report.mechanism), ": claimed eps = ",
      FormatDouble(report.epsilon_claimed), ", observed eps = ",
      FormatDouble(report.epsilon_observed), " (Pr[", report.witness_output,
      " | ", report.witness_numerator, "] / Pr[", report.witness_output, " | ",
      report.witness_denominator, "])");
}

}  // namespace ldpmd
