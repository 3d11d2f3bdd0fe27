//
// Copyright 2026 The dprag Authors
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
//

#include "dprag/experiment.h"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "dprag/retrieval.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "scenarios.h"
#include "test_util.h"

namespace dprag {
namespace {

using ::dprag::testing::MakeGatsbyScenario;
using ::dprag::testing::ScriptedScenario;
using ::dprag::testing::StatusIs;
using ::testing::HasSubstr;
using ::testing::StartsWith;

class ExperimentTest : public ::testing::Test {
 protected:
  ExperimentTest() : scenario_(MakeGatsbyScenario(5)) {
    index_.emplace(*TfIdfIndex::Build(scenario_.corpus));
    questions_.push_back({scenario_.question, {"novel"}});
    config_.grid = {
        {Algorithm::kNonRag, Algorithm::kVoteRag, Algorithm::kDpSparseVoteRag},
        {5e6},
        {1e6},
        {3, 5}};
    config_.delta_token = 1e-6;
    config_.repetitions = 3;
    config_.base_seed = 42;
  }

  ScriptedScenario scenario_;
  std::optional<TfIdfIndex> index_;
  std::vector<QaExample> questions_;
  ExperimentConfig config_;
};

TEST_F(ExperimentTest, OneCellPerGridPointInOrder) {
  ASSERT_OK_AND_ASSIGN(
      const std::vector<CellResult> cells,
      RunExperiment(config_, questions_, &*index_, *scenario_.generator));
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].algorithm, Algorithm::kNonRag);
  EXPECT_EQ(cells[0].m, 3);
  EXPECT_EQ(cells[1].m, 5);
  EXPECT_EQ(cells[5].algorithm, Algorithm::kDpSparseVoteRag);
  EXPECT_EQ(cells[5].tau, 2.5);
}

TEST_F(ExperimentTest, AccuracyPerAlgorithm) {
  ASSERT_OK_AND_ASSIGN(
      const std::vector<CellResult> cells,
      RunExperiment(config_, questions_, &*index_, *scenario_.generator));
  for (const CellResult& cell : cells) {
    const double expected = cell.algorithm == Algorithm::kNonRag ? 0.0 : 1.0;
    EXPECT_EQ(cell.accuracy_mean, expected);
    EXPECT_EQ(cell.accuracy_std, 0.0);
    EXPECT_EQ(cell.mean_tokens, 6.0);
    EXPECT_EQ(cell.error_count, 0);
  }
  EXPECT_EQ(cells[4].mean_private_votes, 1.0);
}

TEST_F(ExperimentTest, InfeasibleRunsCountAsErrors) {
  config_.grid = {{Algorithm::kDpVoteRag}, {1.0}, {1e6}, {3}};
  ASSERT_OK_AND_ASSIGN(
      const std::vector<CellResult> cells,
      RunExperiment(config_, questions_, &*index_, *scenario_.generator));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].error_count, 3);
  EXPECT_EQ(cells[0].accuracy_mean, 0.0);
  EXPECT_THAT(cells[0].errors[1], StartsWith("q0 r1: OUT_OF_RANGE"));
}

TEST_F(ExperimentTest, ThreadCountDoesNotChangeResults) {
  config_.grid.epsilon_tokens = {2.0};
  config_.grid.epsilon_totals = {20.0};
  config_.repetitions = 8;
  ASSERT_OK_AND_ASSIGN(
      const std::vector<CellResult> serial,
      RunExperiment(config_, questions_, &*index_, *scenario_.generator));
  config_.jobs = 4;
  ASSERT_OK_AND_ASSIGN(
      const std::vector<CellResult> parallel,
      RunExperiment(config_, questions_, &*index_, *scenario_.generator));
  EXPECT_EQ(ResultsCsv(serial), ResultsCsv(parallel));
}

TEST_F(ExperimentTest, WritesOneTracePerRun) {
  const std::filesystem::path dir =
      std::filesystem::path(::testing::TempDir()) / "experiment_traces";
  std::filesystem::remove_all(dir);
  config_.grid.algorithms = {Algorithm::kVoteRag};
  config_.grid.ms = {3};
  config_.trace_dir = dir;
  ASSERT_OK(RunExperiment(config_, questions_, &*index_, *scenario_.generator));
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    EXPECT_EQ(entry.path().extension(), ".json");
    ++files;
  }
  EXPECT_EQ(files, 3);
}

TEST_F(ExperimentTest, RejectsBadConfigs) {
  config_.repetitions = 0;
  EXPECT_THAT(
      RunExperiment(config_, questions_, &*index_, *scenario_.generator),
      StatusIs(absl::StatusCode::kInvalidArgument));
  config_.repetitions = 1;
  config_.grid.ms.clear();
  EXPECT_THAT(
      RunExperiment(config_, questions_, &*index_, *scenario_.generator),
      StatusIs(absl::StatusCode::kInvalidArgument));
  config_.grid.ms = {1};
  EXPECT_THAT(RunExperiment(config_, {}, &*index_, *scenario_.generator),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(
      RunExperiment(config_, questions_, nullptr, *scenario_.generator),
      StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("vote-rag")));
}

TEST(RunSeedTest, DistinctAcrossQuestionsAndRepetitions) {
  std::set<uint64_t> seeds;
  for (size_t q = 0; q < 50; ++q) {
    for (int r = 0; r < 50; ++r) seeds.insert(RunSeed(7, q, r));
  }
  EXPECT_EQ(seeds.size(), 2500u);
  EXPECT_EQ(RunSeed(7, 3, 4), RunSeed(7, 3, 4));
  EXPECT_NE(RunSeed(7, 3, 4), RunSeed(8, 3, 4));
}

TEST(ResultsCsvTest, FormatsCells) {
  CellResult cell;
  cell.algorithm = Algorithm::kDpVoteRag;
  cell.epsilon_total = 10;
  cell.epsilon_token = 0.5;
  cell.m = 20;
  cell.k = 1;
  cell.tau = 10;
  cell.accuracy_mean = 0.25;
  cell.accuracy_std = 0.125;
  cell.mean_tokens = 3;
  cell.mean_private_votes = 3;
  cell.error_count = 2;
  const std::vector<CellResult> cells = {cell};
  EXPECT_EQ(ResultsCsv(cells),
            std::string(kResultsCsvHeader) +
                "\ndp-vote-rag,10,0.5,20,1,10,0.250000,0.125000,3.000000,"
                "3.000000,2\n");
}

}  // namespace
}  // namespace dprag
