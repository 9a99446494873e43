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


#include "cli.h"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include "absl/status/status.h"
#include "ldpmd/csv.h"
#include "test_util.h"

namespace ldpmd::cli {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult RunCli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"ldpmd"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Temp(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::string& path, const std::string& text) {
  ASSERT_OK(WriteFile(path, text));
}

constexpr char kConfig[] = R"json({
  "dataset": "gauss",
  "n": 1000,
  "epsilon": [1],
  "mechanisms": ["BiSampleMD", "Harmony"],
  "behaviors": ["null", "top"],
  "trials": 3
})json";

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCode(absl::OkStatus()), 0);
  EXPECT_EQ(ExitCode(absl::InvalidArgumentError("ConfigError: x")), 2);
  EXPECT_EQ(ExitCode(absl::UnavailableError("IoError: x")), 3);
  EXPECT_EQ(ExitCode(absl::NotFoundError("FileNotFound: x")), 3);
  EXPECT_EQ(ExitCode(absl::OutOfRangeError("AllNullPopulation")), 1);
}

TEST(CliTest, SubcommandRequired) {
  EXPECT_NE(RunCli({}).code, 0);
  EXPECT_NE(RunCli({"frobnicate"}).code, 0);
}

TEST(CliTest, ExperimentRequiresSeed) {
  const std::string config = Temp("seedless.json");
  WriteText(config, kConfig);
  const RunResult r = RunCli({"experiment", "--config", config});
  EXPECT_NE(r.code, 0);
  EXPECT_THAT(r.out + r.err, HasSubstr("--seed"));
}

TEST(CliTest, ExperimentErrorsMapToExitCodes) {
  const std::string bad = Temp("bad.json");
  WriteText(bad, R"({"epsilon": [1], "mechanisms": ["Harmony"],
                     "behaviors": ["null"]})");
  RunResult r = RunCli({"experiment", "--config", bad, "--seed", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_THAT(r.err, HasSubstr("ConfigError"));

  r = RunCli({"experiment", "--config", Temp("missing.json"), "--seed", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_THAT(r.err, HasSubstr("FileNotFound"));

  const std::string good = Temp("good.json");
  WriteText(good, kConfig);
  r = RunCli({"experiment", "--config", good, "--seed", "1", "-o",
              "/nonexistent_dir/out.csv"});
  EXPECT_EQ(r.code, 3);
  EXPECT_THAT(r.err, HasSubstr("IoError"));
}

TEST(CliTest, ExperimentIsReproducible) {
  const std::string config = Temp("repro.json");
  WriteText(config, kConfig);
  const std::string a = Temp("repro_a.csv");
  const std::string b = Temp("repro_b.csv");
  const std::string trials = Temp("repro_trials.csv");
  ASSERT_EQ(RunCli({"experiment", "--config", config, "--seed", "11", "-o", a,
                    "--trials-output", trials})
                .code,
            0);
  ASSERT_EQ(RunCli({"experiment", "--config", config, "--seed", "11",
                    "--output", b, "--threads", "2"})
                .code,
            0);
  EXPECT_EQ(ReadAll(a), ReadAll(b));
  EXPECT_THAT(ReadAll(a), StartsWith("mechanism,behavior,dataset,"));
  EXPECT_THAT(ReadAll(trials), StartsWith("mechanism,behavior,dataset,"));

  // stdout when no output path is given.
  const RunResult r = RunCli({"experiment", "--config", config, "--seed", "11"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, ReadAll(a));
  const RunResult other =
      RunCli({"experiment", "--config", config, "--seed", "12"});
  EXPECT_NE(other.out, r.out);
}

TEST(CliTest, GeneratePerturbEstimatePipeline) {
  const std::string population = Temp("pop.csv");
  const std::string reports = Temp("reports.csv");
  ASSERT_EQ(RunCli({"generate", "--dataset", "gauss", "-n", "20000",
                    "--missing-rate", "0.3", "--epsilon", "1", "--seed", "5",
                    "-o", population})
                .code,
            0);
  ASSERT_OK_AND_ASSIGN(auto rows, ReadRecords(population, ','));
  ASSERT_EQ(rows.size(), 20001u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"value", "preference"}));

  ASSERT_EQ(RunCli({"perturb", "--population", population, "--mechanism",
                    "BiSampleMD", "--epsilon", "1", "--seed", "6", "-o",
                    reports})
                .code,
            0);
  EXPECT_THAT(ReadAll(reports), StartsWith("direction,bit\n"));

  const RunResult est = RunCli(
      {"estimate", "--reports", reports, "--mechanism", "BiSampleMD",
       "--epsilon", "1"});
  ASSERT_EQ(est.code, 0) << est.err;
  EXPECT_THAT(est.out, StartsWith("quantity,value\n"));
  // Missing rate within 6 sd of 0.3: sd ~ 1 / (sqrt(n) t) = 0.0153.
  std::istringstream lines(est.out);
  std::string line;
  bool saw_rate = false;
  while (std::getline(lines, line)) {
    if (line.rfind("missing_rate,", 0) == 0) {
      const double rate = *ParseDouble(line.substr(13));
      EXPECT_NEAR(rate, 0.3, 6 * 0.0153);
      saw_rate = true;
    }
  }
  EXPECT_TRUE(saw_rate);

  // Mechanism and report layout must agree.
  EXPECT_EQ(RunCli({"estimate", "--reports", reports, "--mechanism",
                    "PrivKVM", "--epsilon", "1"})
                .code,
            2);
  EXPECT_EQ(RunCli({"estimate", "--reports", Temp("none.csv"), "--mechanism",
                    "BiSampleMD", "--epsilon", "1"})
                .code,
            3);
}

TEST(CliTest, PerturbOtherMechanisms) {
  const std::string population = Temp("pop_small.csv");
  ASSERT_EQ(RunCli({"generate", "-n", "100", "--seed", "1", "-o", population})
                .code,
            0);
  RunResult r = RunCli({"perturb", "--population", population, "--mechanism",
                        "PrivKVM", "--epsilon", "1", "--seed", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_THAT(r.out, StartsWith("key,value\n"));
  r = RunCli({"perturb", "--population", population, "--mechanism", "PM",
              "--epsilon", "1", "--behavior", "top", "--seed", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_THAT(r.out, StartsWith("value\n"));
  // Repeatable for a fixed seed.
  EXPECT_EQ(r.out, RunCli({"perturb", "--population", population,
                           "--mechanism", "PM", "--epsilon", "1",
                           "--behavior", "top", "--seed", "2"})
                       .out);
  r = RunCli({"perturb", "--population", population, "--mechanism", "Nope",
              "--epsilon", "1", "--seed", "2"});
  EXPECT_EQ(r.code, 2);
}

TEST(CliTest, AuditOutputs) {
  RunResult r = RunCli({"audit", "--mechanism", "BiSample", "--epsilon", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_THAT(r.out,
              StartsWith("mechanism,epsilon_claimed,epsilon_observed,"
                         "witness_t1,witness_t2,witness_output\n"));
  r = RunCli({"audit", "--mechanism", "RR", "--epsilon", "0.5", "--text"});
  EXPECT_EQ(r.code, 0);
  EXPECT_THAT(r.out, HasSubstr("RR"));
  r = RunCli({"audit", "--mechanism", "Foo"});
  EXPECT_EQ(r.code, 2);
  r = RunCli({"audit", "--epsilon", "-1"});
  EXPECT_EQ(r.code, 2);
}

}  // namespace
}  // namespace ldpmd::cli
