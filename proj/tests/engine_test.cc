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

#include "dprag/engine.h"

#include <filesystem>
#include <string>
#include <vector>

#include "dprag/retrieval.h"
#include "dprag/scripted_generator.h"
#include "dprag/trace_io.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "scenarios.h"
#include "test_util.h"

namespace dprag {
namespace {

using ::dprag::testing::MakeGatsbyScenario;
using ::dprag::testing::MakeVotingScenario;
using ::dprag::testing::ScriptedScenario;
using ::dprag::testing::StatusIs;
using ::dprag::testing::VotingScenarioOptions;
using ::testing::Each;
using ::testing::Field;
using ::testing::MatchesRegex;

std::vector<std::string> Surfaces(const GenerationTrace& trace) {
  std::vector<std::string> surfaces;
  for (const Token& token : trace.answer) surfaces.push_back(token.surface);
  return surfaces;
}

// Budgets large enough that every mechanism is effectively exact.
RunConfig Noiseless(Algorithm algorithm, int m, int max_private_steps = 100) {
  RunConfig config;
  config.algorithm = algorithm;
  config.m = m;
  config.per_token = {1e6, 1e-6};
  config.total = {1e6 * max_private_steps, 1e-4};
  return config;
}

TEST(NonRagTest, StopsAtEos) {
  ScriptedGenerator generator;
  generator.Add("q", std::vector<std::string>{}, {}, "hello");
  generator.Add("q", std::vector<std::string>{}, {"hello"}, "world");
  ASSERT_OK_AND_ASSIGN(const GenerationTrace trace,
                       RunNonRag("q", generator, 10));
  EXPECT_EQ(trace.AnswerText(), "hello world");
  EXPECT_EQ(trace.halt_reason, HaltReason::kEos);
  EXPECT_EQ(trace.steps.size(), 3u);
  EXPECT_TRUE(trace.retrieved.empty());
}

TEST(NonRagTest, StopsAtCap) {
  ScriptedGenerator generator("again");
  ASSERT_OK_AND_ASSIGN(const GenerationTrace trace,
                       RunNonRag("q", generator, 3));
  EXPECT_EQ(trace.AnswerText(), "again again again");
  EXPECT_EQ(trace.halt_reason, HaltReason::kCapReached);
  EXPECT_THAT(RunNonRag("q", generator, 0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(VoteRagTest, UnanimousVotersSpellTheAnswer) {
  ScriptedScenario scenario = MakeGatsbyScenario(5);
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build(scenario.corpus));
  Rng rng(3);
  ASSERT_OK_AND_ASSIGN(
      const GenerationTrace trace,
      RunVoteRag(scenario.question, index, *scenario.generator, 5, 1, rng, 20));
  EXPECT_EQ(Surfaces(trace), scenario.voted_answer);
  EXPECT_EQ(trace.halt_reason, HaltReason::kEos);
  EXPECT_THAT(trace.retrieved, Each(MatchesRegex("gatsby-.*")));
}

TEST(VoteRagTest, PluralityWinsOverNoisyVoters) {
  VotingScenarioOptions options;
  options.m = 7;
  options.voter_noise = 0.4;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    ScriptedScenario scenario = MakeVotingScenario(seed, options);
    ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                         TfIdfIndex::Build(scenario.corpus));
    Rng rng(seed);
    ASSERT_OK_AND_ASSIGN(const GenerationTrace trace,
                         RunVoteRag(scenario.question, index,
                                    *scenario.generator, 7, 1, rng, 20));
    EXPECT_EQ(Surfaces(trace), scenario.voted_answer) << "seed " << seed;
  }
}

TEST(VoteRagTest, TiesGoToTheLowestTokenId) {
  ScriptedGenerator generator;
  generator.Add("q", std::vector<std::string>{"d1"}, {}, "zeta");
  generator.Add("q", std::vector<std::string>{"d2"}, {}, "alpha");
  ASSERT_OK_AND_ASSIGN(
      const TfIdfIndex index,
      TfIdfIndex::Build({{"d1", "q one", "a"}, {"d2", "q two", "b"}}));
  Rng rng(0);
  ASSERT_OK_AND_ASSIGN(const GenerationTrace trace,
                       RunVoteRag("q", index, generator, 2, 1, rng, 5));
  ASSERT_FALSE(trace.steps.empty());
  EXPECT_EQ(generator.vocabulary().Surface(*trace.steps[0].emitted_token),
            "zeta");
}

TEST(DpVoteRagTest, NoiselessMatchesVoteRag) {
  VotingScenarioOptions options;
  options.m = 9;
  options.voter_noise = 0.3;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    ScriptedScenario scenario = MakeVotingScenario(seed, options);
    ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                         TfIdfIndex::Build(scenario.corpus));
    RunConfig config = Noiseless(Algorithm::kDpVoteRag, 9);
    config.seed = seed;
    ASSERT_OK_AND_ASSIGN(
        const GenerationTrace trace,
        dprag::Run(scenario.question, &index, *scenario.generator, config));
    EXPECT_EQ(Surfaces(trace), scenario.voted_answer) << "seed " << seed;
    EXPECT_EQ(trace.halt_reason, HaltReason::kEos);
    EXPECT_EQ(trace.PrivateVotes(), static_cast<int64_t>(trace.steps.size()));
  }
}

TEST(DpVoteRagTest, StopsWhenTheBudgetRunsOut) {
  ScriptedScenario scenario = MakeGatsbyScenario(10);
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build(scenario.corpus));
  const RunConfig config = Noiseless(Algorithm::kDpVoteRag, 10, 5);
  ASSERT_OK_AND_ASSIGN(
      const GenerationTrace trace,
      dprag::Run(scenario.question, &index, *scenario.generator, config));
  EXPECT_EQ(trace.AnswerText(), "the great gatsby is a");
  EXPECT_EQ(trace.halt_reason, HaltReason::kBudgetExhausted);
  ASSERT_TRUE(trace.plan.has_value());
  EXPECT_EQ(trace.plan->max_steps, 5);
  EXPECT_EQ(trace.steps.back().budget_remaining_after, 0);
}

TEST(DpVoteRagTest, WeakConsensusYieldsNull) {
  // Two voters disagree; at epsilon 0.1 neither clears the cutoff.
  ScriptedGenerator generator;
  generator.Add("q", std::vector<std::string>{"d1"}, {}, "x");
  generator.Add("q", std::vector<std::string>{"d2"}, {}, "y");
  ASSERT_OK_AND_ASSIGN(
      const TfIdfIndex index,
      TfIdfIndex::Build({{"d1", "q one", "a"}, {"d2", "q two", "b"}}));
  RunConfig config;
  config.algorithm = Algorithm::kDpVoteRag;
  config.m = 2;
  config.per_token = {0.1, 1e-5};
  config.total = {1.0, 1e-4};
  ASSERT_OK_AND_ASSIGN(const GenerationTrace trace,
                       dprag::Run("q", &index, generator, config));
  EXPECT_EQ(trace.halt_reason, HaltReason::kNullToken);
  EXPECT_TRUE(trace.answer.empty());
  EXPECT_FALSE(trace.steps[0].emitted_token.has_value());
}

TEST(DpSparseVoteRagTest, AgreementCostsNothing) {
  ScriptedGenerator generator;
  for (const std::optional<std::vector<std::string>>& docs :
       {std::optional<std::vector<std::string>>(std::vector<std::string>{}),
        std::optional<std::vector<std::string>>()}) {
    generator.Add("q", docs, {}, "same");
    generator.Add("q", docs, {"same"}, "answer");
  }
  ASSERT_OK_AND_ASSIGN(
      const TfIdfIndex index,
      TfIdfIndex::Build(
          {{"d1", "q", "a"}, {"d2", "q", "b"}, {"d3", "q", "c"}}));
  RunConfig config = Noiseless(Algorithm::kDpSparseVoteRag, 3);
  ASSERT_OK_AND_ASSIGN(const GenerationTrace trace,
                       dprag::Run("q", &index, generator, config));
  EXPECT_EQ(trace.AnswerText(), "same answer");
  EXPECT_EQ(trace.PrivateVotes(), 0);
  EXPECT_THAT(trace.steps,
              Each(Field(&StepRecord::verdict, StepVerdict::kSparsePass)));
}

TEST(DpSparseVoteRagTest, GatsbySpendsOnePrivateVote) {
  ScriptedScenario scenario = MakeGatsbyScenario(10);
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build(scenario.corpus));
  const RunConfig config = Noiseless(Algorithm::kDpSparseVoteRag, 10);
  ASSERT_OK_AND_ASSIGN(
      const GenerationTrace trace,
      dprag::Run(scenario.question, &index, *scenario.generator, config));
  EXPECT_EQ(Surfaces(trace), scenario.voted_answer);
  EXPECT_EQ(trace.PrivateVotes(), 1);
  EXPECT_EQ(trace.steps[5].verdict, StepVerdict::kPrivateVote);
  EXPECT_EQ(trace.halt_reason, HaltReason::kEos);
}

TEST(DpSparseVoteRagTest, ExhaustedBudgetHalts) {
  VotingScenarioOptions options;
  options.m = 5;
  ScriptedScenario scenario = MakeVotingScenario(11, options);
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build(scenario.corpus));
  const RunConfig config = Noiseless(Algorithm::kDpSparseVoteRag, 5, 1);
  ASSERT_OK_AND_ASSIGN(
      const GenerationTrace trace,
      dprag::Run(scenario.question, &index, *scenario.generator, config));
  EXPECT_EQ(trace.halt_reason, HaltReason::kBudgetExhausted);
  EXPECT_EQ(trace.PrivateVotes(), 1);
  EXPECT_EQ(trace.answer.size(), 1u);
}

TEST(DpSparseVoteRagTest, RespectsOutputCap) {
  ScriptedGenerator generator("more");
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build({{"d1", "q", "a"}}));
  RunConfig config = Noiseless(Algorithm::kDpSparseVoteRag, 1);
  config.t_max_cap = 4;
  ASSERT_OK_AND_ASSIGN(const GenerationTrace trace,
                       dprag::Run("q", &index, generator, config));
  EXPECT_EQ(trace.answer.size(), 4u);
  EXPECT_EQ(trace.halt_reason, HaltReason::kCapReached);
}

TEST(RunTest, ValidatesConfig) {
  ScriptedGenerator generator;
  RunConfig config;
  config.m = 0;
  EXPECT_THAT(dprag::Run("q", nullptr, generator, config),
              StatusIs(absl::StatusCode::kInvalidArgument));
  config.m = 1;
  EXPECT_THAT(dprag::Run("q", nullptr, generator, config),
              StatusIs(absl::StatusCode::kInvalidArgument));
  config.per_token = {1.0, 0.0};
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build({{"d1", "q", "a"}}));
  EXPECT_THAT(dprag::Run("q", &index, generator, config),
              StatusIs(absl::StatusCode::kInvalidArgument));
  config.per_token = {20.0, 1e-5};
  EXPECT_THAT(dprag::Run("q", &index, generator, config),
              StatusIs(absl::StatusCode::kOutOfRange));
  config.per_token = {1.0, 1e-5};
  config.m = 2;
  EXPECT_THAT(dprag::Run("q", &index, generator, config),
              StatusIs(absl::StatusCode::kFailedPrecondition));
}

TEST(RunTest, AlgorithmNamesRoundTrip) {
  for (Algorithm algorithm :
       {Algorithm::kNonRag, Algorithm::kVoteRag, Algorithm::kDpVoteRag,
        Algorithm::kDpSparseVoteRag}) {
    EXPECT_EQ(ParseAlgorithm(AlgorithmName(algorithm)), algorithm);
  }
  EXPECT_EQ(ParseAlgorithm("dp-rag"), std::nullopt);
}

TEST(TraceTest, SameSeedSameTrace) {
  VotingScenarioOptions options;
  options.m = 6;
  options.voter_noise = 0.5;
  options.predictable_fraction = 0.5;
  ScriptedScenario scenario = MakeVotingScenario(5, options);
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build(scenario.corpus));
  RunConfig config;
  config.algorithm = Algorithm::kDpSparseVoteRag;
  config.m = 6;
  config.per_token = {2.0, 1e-5};
  config.total = {20.0, 1e-4};
  config.seed = 99;
  const Vocabulary& vocabulary = scenario.generator->vocabulary();
  ASSERT_OK_AND_ASSIGN(
      const GenerationTrace first,
      dprag::Run(scenario.question, &index, *scenario.generator, config));
  ASSERT_OK_AND_ASSIGN(
      const GenerationTrace second,
      dprag::Run(scenario.question, &index, *scenario.generator, config));
  EXPECT_EQ(TraceToJson(first, vocabulary).dump(),
            TraceToJson(second, vocabulary).dump());
}

TEST(TraceTest, JsonCarriesTheRun) {
  ScriptedScenario scenario = MakeGatsbyScenario(4);
  ASSERT_OK_AND_ASSIGN(const TfIdfIndex index,
                       TfIdfIndex::Build(scenario.corpus));
  RunConfig config = Noiseless(Algorithm::kDpSparseVoteRag, 4);
  config.seed = 17;
  ASSERT_OK_AND_ASSIGN(
      const GenerationTrace trace,
      dprag::Run(scenario.question, &index, *scenario.generator, config));
  const nlohmann::json json =
      TraceToJson(trace, scenario.generator->vocabulary());
  EXPECT_EQ(json["answer"], "the great gatsby is a novel");
  EXPECT_EQ(json["algorithm"], "dp-sparse-vote-rag");
  EXPECT_EQ(json["halt_reason"], "eos");
  EXPECT_EQ(json["private_votes"], 1);
  EXPECT_EQ(json["config"]["seed"], 17);
  EXPECT_EQ(json["steps"].size(), trace.steps.size());
  EXPECT_EQ(json["partition"].size(), 4u);

  const std::filesystem::path dir =
      std::filesystem::path(::testing::TempDir()) / "engine_trace_test";
  std::filesystem::remove_all(dir);
  ASSERT_OK_AND_ASSIGN(
      const std::filesystem::path path,
      WriteTrace(trace, scenario.generator->vocabulary(), dir));
  EXPECT_EQ(path.filename().string(), TraceFileName(config));
  EXPECT_TRUE(std::filesystem::exists(path));
}

TEST(TraceTest, FileNameHashesConfigWithoutSeed) {
  RunConfig a;
  RunConfig b;
  b.seed = 5;
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  EXPECT_THAT(TraceFileName(b), MatchesRegex("trace-[0-9a-f]{16}-5\\.json"));
  b.m = 3;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
}

}  // namespace
}  // namespace dprag
