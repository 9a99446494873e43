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


#include "ldpmd/random.h"

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>
#include "test_util.h"

namespace ldpmd {
namespace {

using ::ldpmd::testing::kSixSigma;

// Known-answer vectors from the Random123 distribution.
TEST(PhiloxTest, KnownAnswerZero) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(PhiloxTest, KnownAnswerAllOnes) {
  EXPECT_EQ(Philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(PhiloxTest, KnownAnswerPiDigits) {
  EXPECT_EQ(Philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

// Reference outputs of Vigna's splitmix64 generator.
TEST(SplitMix64Test, MatchesReferenceSequence) {
  EXPECT_EQ(SplitMix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(SplitMix64(1234567), 6457827717110365317ULL);
  EXPECT_EQ(SplitMix64(1234567 + 0x9E3779B97F4A7C15ULL),
            3203168211198807973ULL);
}

// Expected words computed by an independent Python transcription of the
// documented stream layout.
TEST(RandomStreamTest, MatchesDocumentedLayout) {
  RandomStream rng(42);
  EXPECT_EQ(rng.NextU64(), 0x9ceaf05377f5493bULL);
  EXPECT_EQ(rng.NextU64(), 0x12bf50ad5742b3d7ULL);
  EXPECT_EQ(rng.NextU64(), 0xfcdb212753ba6cfdULL);

  RandomStream child = RandomStream(42).Fork(7);
  EXPECT_EQ(child.stream(), 0xb8b4c2977eabce45ULL);
  EXPECT_EQ(child.NextU64(), 0x4b717dea214be6a6ULL);
  EXPECT_EQ(child.NextU64(), 0x7f4200f8dad9cacbULL);

  EXPECT_DOUBLE_EQ(RandomStream(42).Uniform01(), 0.6129598811894158);
}

TEST(RandomStreamTest, SameSeedSameSequence) {
  RandomStream a(123, 9);
  RandomStream b(123, 9);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.NextU32(), b.NextU32());
}

TEST(RandomStreamTest, ForksAreDistinctAndDeterministic) {
  const RandomStream root(5);
  std::set<uint64_t> firsts;
  for (uint64_t c = 0; c < 100; ++c) {
    RandomStream child = root.Fork(c);
    firsts.insert(child.NextU64());
    EXPECT_EQ(root.Fork(c).stream(), child.stream());
  }
  EXPECT_EQ(firsts.size(), 100u);
  RandomStream parent = root;
  EXPECT_NE(parent.NextU64(), root.Fork(0).NextU64());
}

TEST(RandomStreamTest, Uniform01InRangeWithCorrectMoments) {
  RandomStream rng(1);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, kSixSigma * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum_sq / n, 1.0 / 3.0, kSixSigma * std::sqrt(4.0 / 45.0 / n));
}

TEST(RandomStreamTest, BernoulliEdgeCases) {
  RandomStream rng(2);
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(rng.Bernoulli(0.0));
    EXPECT_TRUE(rng.Bernoulli(1.0));
  }
}

TEST(RandomStreamTest, UniformIntIsUniform) {
  RandomStream rng(3);
  const int bound = 7;
  const int n = 70000;
  std::vector<int> counts(bound, 0);
  for (int i = 0; i < n; ++i) {
    const uint64_t x = rng.UniformInt(bound);
    ASSERT_LT(x, static_cast<uint64_t>(bound));
    ++counts[x];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(n) / bound;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 6 degrees of freedom; 99.99th percentile is about 27.9.
  EXPECT_LT(chi2, 27.9);
  EXPECT_EQ(rng.UniformInt(1), 0u);
}

TEST(RandomStreamTest, NormalMoments) {
  RandomStream rng(4);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal(2.0, 3.0);
    sum += z;
    sum_sq += (z - 2.0) * (z - 2.0);
  }
  EXPECT_NEAR(sum / n, 2.0, kSixSigma * 3.0 / std::sqrt(n));
  EXPECT_NEAR(sum_sq / n, 9.0, kSixSigma * 9.0 * std::sqrt(2.0 / n));
}

TEST(RandomStreamTest, ExponentialMean) {
  RandomStream rng(5);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Exponential(0.1);
    ASSERT_GE(x, 0.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.1, kSixSigma * 0.1 / std::sqrt(n));
}

}  // namespace
}  // namespace ldpmd
