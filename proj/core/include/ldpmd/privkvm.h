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

// Key-value baseline in the style of PrivKVM (Ye et al., IEEE S&P 2019),
// reduced to one key per user. A value is encoded as <1, v>, a null as <0, ->.
//
// This is a reconstruction, not a port: the budget split (eps/2 each for key
// and value), the single real iteration, and the virtual-iteration update
// below are our choices.
//
// Perturbation (budget eps1 for the key, eps2 for the value):
//   <1, v>: with prob p1 report <1, RR_eps2(Dis(v))>, else <0, ->.
//   <0, ->: with prob p1 report <0, ->, else <1, u> with u uniform on {-1, 1}
//           (RR of a uniform sign is again uniform).
//
// Estimation:
//   f_k = RR-adjusted frequency of key 1; missing rate = 1 - f_k.
//   Among the N1 key-1 reports, the RR-calibrated +1/-1 counts mix genuine
//   reports with F = n (1 - f_k) (1 - p1) fakes centred on 0. Each virtual
//   iteration moves the fakes' expected contribution from their current
//   centre to the latest mean estimate, so m_{t+1} = (D + F m_t) / N1 where D
//   is the genuine difference; the fixed point is the genuine mean.

#ifndef LDPMD_PRIVKVM_H_
#define LDPMD_PRIVKVM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpmd/mechanisms.h"
#include "ldpmd/random.h"

namespace ldpmd {

struct KvPair {
  bool key = false;
  // In [-1, 1]; meaningful only when key is set. Perturbed pairs carry +-1.
  double value = 0.0;

  friend bool operator==(const KvPair&, const KvPair&) = default;
};

class PrivKvmConfig {
 public:
  // Splits `total` into key_fraction * eps for the key and the rest for the
  // value. Only one real iteration is supported.
  static absl::StatusOr<PrivKvmConfig> Create(const PrivacyBudget& total,
                                              int real_iterations = 1,
                                              int virtual_iterations = 5,
                                              double key_fraction = 0.5);

  const PrivacyBudget& total() const { return total_; }
  const PrivacyBudget& key_budget() const { return key_budget_; }
  const PrivacyBudget& value_budget() const { return value_budget_; }
  int real_iterations() const { return real_iterations_; }
  int virtual_iterations() const { return virtual_iterations_; }

 private:
  PrivKvmConfig(PrivacyBudget total, PrivacyBudget key, PrivacyBudget value,
                int real_iterations, int virtual_iterations)
      : total_(total),
        key_budget_(key),
        value_budget_(value),
        real_iterations_(real_iterations),
        virtual_iterations_(virtual_iterations) {}

  PrivacyBudget total_;
  PrivacyBudget key_budget_;
  PrivacyBudget value_budget_;
  int real_iterations_;
  int virtual_iterations_;
};

// Real(v) -> <1, v>; Null -> <0, 0>.
KvPair KvEncode(const PreparedValue& value);

// InvalidArgument when a key-1 value lies outside [-1, 1].
absl::StatusOr<KvPair> PrivKvmPerturb(const KvPair& pair,
                                      const PrivKvmConfig& config,
                                      RandomStream& rng);

// Mergeable report counts.
struct KvCounts {
  uint64_t key_zero = 0;
  uint64_t plus = 0;
  uint64_t minus = 0;

  uint64_t n() const { return key_zero + plus + minus; }
  void Add(const KvPair& report);
  KvCounts& operator+=(const KvCounts& other);
  friend bool operator==(const KvCounts&, const KvCounts&) = default;
};

struct KvmEstimate {
  double missing_rate = 0.0;
  double mean = 0.0;
  double key_frequency = 0.0;
  // Mean after the real iteration and after each virtual iteration.
  std::vector<double> mean_trace;
};

// RR-adjusted key frequency f_k and missing rate 1 - f_k. Never fails on a
// non-empty stream, so callers keep the missing rate when the mean is
// undefined.
double PrivKvmKeyFrequency(const KvCounts& counts, const PrivKvmConfig& config);

// DegenerateFrequency (kOutOfRange) when the adjusted key frequency is <= 0;
// InvalidArgument when there are no reports.
absl::StatusOr<KvmEstimate> PrivKvmEstimate(const KvCounts& counts,
                                            const PrivKvmConfig& config);
absl::StatusOr<KvmEstimate> PrivKvmEstimate(std::span<const KvPair> reports,
                                            const PrivKvmConfig& config);

}  // namespace ldpmd

#endif  // LDPMD_PRIVKVM_H_
