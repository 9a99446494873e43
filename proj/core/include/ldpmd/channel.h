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

// Closed-form output probabilities of the two-bit samplers, written directly
// from the sampling rules:
//
//   negative sampling: Pr[b = 1] = (1 - e^eps) / (1 + e^eps) * v / 2 + 1 / 2
//   positive sampling: Pr[b = 1] = (e^eps - 1) / (e^eps + 1) * v / 2 + 1 / 2
//   null input:        Pr[b = 1] = 1 / (e^eps + 1) in either direction
//
// These are deliberately a separate code path from the samplers in
// mechanisms.cc, which is what makes Monte Carlo cross-checks meaningful.
// Precision degrades for eps beyond ~20 where 1 - tanh(eps / 2) cancels.

#ifndef LDPMD_CHANNEL_H_
#define LDPMD_CHANNEL_H_

#include "ldpmd/mechanisms.h"

namespace ldpmd {

// Pr[b = 1 | direction, input].
double SampleBitProbability(SamplingDirection direction,
                            const PreparedValue& input,
                            const PrivacyBudget& budget);

// Pr[report | input], including the 1/2 for the direction.
double ReportProbability(const PerturbedReport& report,
                         const PreparedValue& input,
                         const PrivacyBudget& budget);

}  // namespace ldpmd

#endif  // LDPMD_CHANNEL_H_
