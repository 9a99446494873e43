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

#ifndef LDPMD_RANDOM_H_
#define LDPMD_RANDOM_H_

#include <array>
#include <cstdint>
#include <limits>

namespace ldpmd {

// Philox4x32-10 block function (Salmon et al., Random123). Maps a 128-bit
// counter and a 64-bit key to 128 pseudorandom bits.
using PhiloxCounter = std::array<uint32_t, 4>;
using PhiloxKey = std::array<uint32_t, 2>;
PhiloxCounter Philox4x32(PhiloxCounter counter, PhiloxKey key);

// SplitMix64 finalizer, used to derive child stream ids.
uint64_t SplitMix64(uint64_t x);

// A seedable, splittable counter-based random stream.
//
// The key is the 64-bit seed; the counter is (block index, stream id), each
// 64 bits. Fork(child) yields an independent stream with the same seed and
// stream id SplitMix64(stream ^ SplitMix64(child)). All derived variates are
// computed by fixed formulas (see docs/rng.md), so a (seed, stream) pair
// reproduces the same sequence on every platform.
//
// Satisfies UniformRandomBitGenerator, but prefer the member samplers: the
// standard <random> distributions are implementation-defined.
class RandomStream {
 public:
  using result_type = uint64_t;

  explicit RandomStream(uint64_t seed, uint64_t stream = 0);

  RandomStream Fork(uint64_t child) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

  uint32_t NextU32();
  uint64_t NextU64();
  result_type operator()() { return NextU64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform01();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi);
  // True with probability `p`; p <= 0 is never, p >= 1 is always.
  bool Bernoulli(double p);
  // Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
  uint64_t UniformInt(uint64_t bound);
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  // Exponential with the given scale (mean).
  double Exponential(double scale);

 private:
  void Refill();

  uint64_t seed_;
  uint64_t stream_;
  uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace ldpmd

#endif  // LDPMD_RANDOM_H_
