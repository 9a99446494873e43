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


#ifndef LDPMD_TESTS_TEST_UTIL_H_
#define LDPMD_TESTS_TEST_UTIL_H_

#include <cmath>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ldpmd::testing {

inline const absl::Status& GetStatus(const absl::Status& s) { return s; }
template <typename T>
const absl::Status& GetStatus(const absl::StatusOr<T>& s) {
  return s.status();
}

MATCHER_P2(StatusIs, code, message_matcher, "") {
  const absl::Status& status = GetStatus(arg);
  *result_listener << "status is " << status;
  return status.code() == code &&
         ::testing::ExplainMatchResult(message_matcher,
                                       std::string(status.message()),
                                       result_listener);
}

MATCHER(IsOk, "") {
  const absl::Status& status = GetStatus(arg);
  *result_listener << "status is " << status;
  return status.ok();
}

// Normal upper-tail quantile used for statistical tolerances.
inline constexpr double kSixSigma = 6.0;

// Binomial-proportion standard error.
inline double ProportionSe(double p, double n) {
  return std::sqrt(p * (1.0 - p) / n);
}

}  // namespace ldpmd::testing

#define LDPMD_CONCAT_INNER(a, b) a##b
#define LDPMD_CONCAT(a, b) LDPMD_CONCAT_INNER(a, b)

#define ASSERT_OK(expr) ASSERT_THAT((expr), ::ldpmd::testing::IsOk())
#define EXPECT_OK(expr) EXPECT_THAT((expr), ::ldpmd::testing::IsOk())

#define ASSERT_OK_AND_ASSIGN(lhs, expr)                              \
  auto LDPMD_CONCAT(status_or_, __LINE__) = (expr);                  \
  ASSERT_THAT(LDPMD_CONCAT(status_or_, __LINE__),                    \
              ::ldpmd::testing::IsOk());                             \
  lhs = std::move(LDPMD_CONCAT(status_or_, __LINE__)).value()

#endif  // LDPMD_TESTS_TEST_UTIL_H_
