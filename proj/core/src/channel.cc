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

#include "ldpmd/channel.h"

#include <cmath>

namespace ldpmd {

double SampleBitProbability(SamplingDirection direction,
                            const PreparedValue& input,
                            const PrivacyBudget& budget) {
  const double e = std::exp(budget.epsilon());
  if (input.is_null()) return 1.0 / (e + 1.0);
  const double v = input.value();
  if (direction == SamplingDirection::kNegative) {
    return (1.0 - e) / (1.0 + e) * v / 2.0 + 0.5;
  }
  return (e - 1.0) / (e + 1.0) * v / 2.0 + 0.5;
}

double ReportProbability(const PerturbedReport& report,
                         const PreparedValue& input,
                         const PrivacyBudget& budget) {
  const double one = SampleBitProbability(report.direction, input, budget);
  return 0.5 * (report.sample ? one : 1.0 - one);
}

}  // namespace ldpmd
