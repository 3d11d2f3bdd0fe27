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

#include "dprag/cli.h"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "dprag/config.h"
#include "dprag/data_io.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dprag {
namespace {

namespace fs = std::filesystem;

using ::dprag::testing::StatusIs;
using ::testing::HasSubstr;
using ::testing::MatchesRegex;
using ::testing::StartsWith;

constexpr char kTable[] = R"({
  "fallback": "<eos>",
  "entries": [
    {"question": "*", "documents": "*", "prefix": [], "token": "paris"},
    {"question": "*", "documents": [], "prefix": [], "token": "london"},
    {"question": "*", "documents": [], "prefix": ["london"], "token": "<eos>"}
  ]
})";

constexpr char kCorpus[] =
    R"({"doc_id": "d1", "text": "the capital of france is paris"})"
    "\n"
    R"({"doc_id": "d2", "text": "paris is the capital of france"})"
    "\n"
    R"({"doc_id": "d3", "text": "rivers and valleys"})"
    "\n";

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_(fs::path(::testing::TempDir()) / "cli_test") {
    fs::remove_all(dir_);
    EXPECT_OK(WriteFile(dir_ / "table.json", kTable));
    EXPECT_OK(WriteFile(dir_ / "corpus.jsonl", kCorpus));
    EXPECT_OK(WriteFile(
        dir_ / "questions.jsonl",
        R"({"question": "What is the capital of France?", "answers": ["Paris"]})"
        "\n"));
  }

  CliResult Call(std::vector<std::string> args) {
    args.insert(args.begin(), "dprag");
    std::vector<const char*> argv;
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code =
        RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  std::vector<std::string> Scripted(std::vector<std::string> args) {
    for (const std::string& arg :
         {std::string("--generator"), std::string("scripted"),
          std::string("--scripted-table"), (dir_ / "table.json").string(),
          std::string("--output-dir"), (dir_ / "out").string()}) {
      args.push_back(arg);
    }
    return args;
  }

  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }

  fs::path dir_;
};

TEST_F(CliTest, AccountantPrintsThePlan) {
  const CliResult result =
      Call({"accountant", "--epsilon-token", "1", "--epsilon-total", "10"});
  EXPECT_EQ(result.code, kExitOk);
  EXPECT_EQ(result.out, "1,1e-05,10,0.0001,sequential,10\n");
}

TEST_F(CliTest, AccountantExitCodes) {
  const CliResult infeasible =
      Call({"accountant", "--epsilon-token", "20", "--epsilon-total", "10"});
  EXPECT_EQ(infeasible.code, kExitInfeasible);
  EXPECT_THAT(infeasible.err, StartsWith("infeasible: "));
  EXPECT_EQ(Call({"accountant", "--epsilon-token", "1"}).code, kExitUsage);
  EXPECT_EQ(
      Call({"accountant", "--epsilon-token", "-1", "--epsilon-total", "10"})
          .code,
      kExitUsage);
  EXPECT_EQ(Call({}).code, kExitUsage);
  EXPECT_EQ(Call({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Call({"--help"}).code, kExitOk);
}

TEST_F(CliTest, GenerateAnswersAndWritesTrace) {
  const CliResult result = Call(Scripted(
      {"generate", "--question", "What is the capital of France?", "--corpus",
       path("corpus.jsonl"), "--m", "2", "--epsilon-token", "1e6",
       "--delta-token", "1e-6", "--epsilon-total", "1e7", "--seed", "3"}));
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(result.out, "paris\n");
  EXPECT_THAT(result.err, MatchesRegex("trace: .*trace-[0-9a-f]+-3\\.json\n"));
  const std::string trace_path = result.err.substr(7, result.err.size() - 8);
  ASSERT_OK_AND_ASSIGN(const std::string trace, ReadFile(trace_path));
  EXPECT_THAT(trace, HasSubstr("\"private_votes\": 1"));
}

TEST_F(CliTest, NonRagIgnoresCorpusWithWarning) {
  const CliResult result =
      Call(Scripted({"generate", "--question", "q", "--algorithm", "non-rag",
                     "--corpus", path("corpus.jsonl")}));
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(result.out, "london\n");
  EXPECT_THAT(result.err, HasSubstr("warning: --algorithm non-rag ignores"));
}

TEST_F(CliTest, GenerateExitCodes) {
  EXPECT_EQ(Call(Scripted({"generate", "--question", "q"})).code, kExitUsage);
  EXPECT_EQ(Call(Scripted({"generate", "--question", "q", "--corpus",
                           path("corpus.jsonl"), "--algorithm", "dp-rag"}))
                .code,
            kExitUsage);
  EXPECT_EQ(Call(Scripted({"generate", "--question", "q", "--corpus",
                           path("missing.jsonl")}))
                .code,
            kExitData);
  EXPECT_EQ(Call(Scripted({"generate", "--question", "q", "--corpus",
                           path("corpus.jsonl"), "--epsilon-token", "20"}))
                .code,
            kExitInfeasible);
  EXPECT_EQ(Call(Scripted({"generate", "--question", "q", "--corpus",
                           path("corpus.jsonl"), "--m", "4"}))
                .code,
            kExitData);
  EXPECT_EQ(Call(Scripted({"generate", "--question", "q", "--corpus",
                           path("corpus.jsonl"), "--m", "0"}))
                .code,
            kExitUsage);
  EXPECT_EQ(
      Call({"generate", "--question", "q", "--algorithm", "non-rag",
            "--generator", "remote", "--remote-endpoint",
            "http://127.0.0.1:1/v1/completions", "--output-dir", path("out")})
          .code,
      kExitBackend);
}

TEST_F(CliTest, ConfigFileWithFlagOverrides) {
  ASSERT_OK(WriteFile(dir_ / "config.toml", R"(
corpus = "corpus.jsonl"
algorithm = "vote-rag"
m = 3
output_dir = "out"

[generator]
kind = "scripted"

[generator.scripted]
table = "table.json"
)"));
  const CliResult result = Call({"generate", "--config", path("config.toml"),
                                 "--question", "q", "--m", "2"});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(result.out, "paris\n");
  EXPECT_THAT(result.err, HasSubstr((dir_ / "out").string()));
}

TEST_F(CliTest, BadConfigIsAUsageError) {
  ASSERT_OK(WriteFile(dir_ / "typo.toml", "epsilon_tokn = 1\n"));
  const CliResult typo =
      Call({"generate", "--config", path("typo.toml"), "--question", "q"});
  EXPECT_EQ(typo.code, kExitUsage);
  EXPECT_THAT(typo.err, HasSubstr("epsilon_tokn"));
  ASSERT_OK(WriteFile(dir_ / "syntax.toml", "m = = 1\n"));
  EXPECT_EQ(
      Call({"generate", "--config", path("syntax.toml"), "--question", "q"})
          .code,
      kExitUsage);
}

TEST_F(CliTest, EvalQaWritesResults) {
  const std::vector<std::string> args =
      Scripted({"eval-qa", "--questions", path("questions.jsonl"), "--corpus",
                path("corpus.jsonl"), "--algorithms", "non-rag,vote-rag",
                "--epsilon-totals", "10", "--epsilon-tokens", "1", "--ms",
                "1,2", "--repetitions", "2"});
  const CliResult result = Call(args);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(result.out, (dir_ / "out" / "results.csv").string() + "\n");
  ASSERT_OK_AND_ASSIGN(const std::string csv,
                       ReadFile(dir_ / "out" / "results.csv"));
  EXPECT_EQ(csv,
            "algorithm,epsilon_total,epsilon_token,m,k,tau,accuracy_mean,"
            "accuracy_std,mean_tokens,mean_private_votes,error_count\n"
            "non-rag,10,1,1,1,0.5,0.000000,0.000000,1.000000,0.000000,0\n"
            "non-rag,10,1,2,1,1,0.000000,0.000000,1.000000,0.000000,0\n"
            "vote-rag,10,1,1,1,0.5,1.000000,0.000000,1.000000,0.000000,0\n"
            "vote-rag,10,1,2,1,1,1.000000,0.000000,1.000000,0.000000,0\n");
  EXPECT_TRUE(fs::is_directory(dir_ / "out" / "traces"));
  EXPECT_EQ(Call(Scripted({"eval-qa", "--corpus", path("corpus.jsonl")})).code,
            kExitUsage);
}

TEST_F(CliTest, EvalMiaReportsAuc) {
  ASSERT_OK(
      WriteFile(dir_ / "in.jsonl",
                R"({"doc_id": "i1", "text": "capital of france ### paris"})"
                "\n"
                R"({"doc_id": "i2", "text": "river in egypt ### nile"})"
                "\n"));
  ASSERT_OK(
      WriteFile(dir_ / "out.jsonl",
                R"({"doc_id": "o1", "text": "capital of spain ### madrid"})"
                "\n"));
  const CliResult result =
      Call(Scripted({"eval-mia", "--in", path("in.jsonl"), "--out",
                     path("out.jsonl"), "--algorithm", "vote-rag"}));
  ASSERT_EQ(result.code, kExitOk) << result.err;
  // Every answer is "paris": i1 scores 1, the others score the floor.
  EXPECT_EQ(result.out,
            (dir_ / "out" / "roc.csv").string() + "\nauc,0.750000\n");
  ASSERT_OK_AND_ASSIGN(const std::string scores,
                       ReadFile(dir_ / "out" / "mia_scores.csv"));
  EXPECT_THAT(scores, StartsWith("doc_id,membership,score\ni1,in,1.000000\n"));
  ASSERT_OK(
      WriteFile(dir_ / "wrong.jsonl",
                R"({"doc_id": "o2", "text": "a ### b", "membership": "in"})"
                "\n"));
  EXPECT_EQ(Call(Scripted({"eval-mia", "--in", path("in.jsonl"), "--out",
                           path("wrong.jsonl")}))
                .code,
            kExitData);
}

TEST(ConfigTest, ParsesEverySection) {
  ASSERT_OK_AND_ASSIGN(const CliConfig config, ParseCliConfig(R"(
corpus = "data/corpus.jsonl"
questions = "/abs/questions.jsonl"
algorithm = "dp-vote-rag"
m = 20
k = 2
tau = 7.5
epsilon_token = 0.5
delta_token = 1e-6
epsilon_total = 20
delta_total = 1e-3
t_max_cap = 32
seed = 9
vocabulary_size = 50272
output_dir = "results"

[generator]
kind = "ngram"

[generator.ngram]
order = 2
context_weight = 50.0

[generator.remote]
endpoint = "http://127.0.0.1:8080/v1/completions"
retries = 5

[sweep]
algorithms = ["vote-rag", "dp-sparse-vote-rag"]
epsilon_totals = [5, 10.5]
ms = [10, 20]
repetitions = 4
jobs = 2
)",
                                                              "/base"));
  EXPECT_EQ(config.corpus_path, fs::path("/base/data/corpus.jsonl"));
  EXPECT_EQ(config.questions_path, fs::path("/abs/questions.jsonl"));
  EXPECT_EQ(config.output_dir, fs::path("/base/results"));
  EXPECT_EQ(config.algorithm, Algorithm::kDpVoteRag);
  EXPECT_EQ(config.tau, 7.5);
  EXPECT_EQ(config.generator.ngram.order, 2);
  EXPECT_EQ(config.generator.ngram.context_weight, 50.0);
  EXPECT_EQ(config.generator.remote.retries, 5);

  const RunConfig run = config.ToRunConfig();
  EXPECT_EQ(run.m, 20);
  EXPECT_EQ(run.k, 2);
  EXPECT_EQ(run.per_token.epsilon, 0.5);
  EXPECT_EQ(run.total.delta, 1e-3);
  EXPECT_EQ(run.vocabulary_size, 50272);
  EXPECT_EQ(run.seed, 9u);

  const ExperimentConfig experiment = config.ToExperimentConfig();
  EXPECT_EQ(experiment.grid.algorithms.size(), 2u);
  EXPECT_EQ(experiment.grid.epsilon_totals, (std::vector<double>{5, 10.5}));
  EXPECT_EQ(experiment.grid.epsilon_tokens, (std::vector<double>{0.5}));
  EXPECT_EQ(experiment.grid.ms, (std::vector<int>{10, 20}));
  EXPECT_EQ(experiment.repetitions, 4);
  EXPECT_EQ(experiment.jobs, 2);
}

TEST(ConfigTest, RejectsBadValues) {
  EXPECT_THAT(ParseCliConfig("m = \"three\"\n", "/"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("'m' must be an integer")));
  EXPECT_THAT(ParseCliConfig("[generator]\nkind = \"gpt\"\n", "/"),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(
      ParseCliConfig("[sweep]\nmss = [1]\n", "/"),
      StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("sweep.mss")));
  EXPECT_THAT(ParseCliConfig("algorithm = \"dp\"\n", "/"),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ConfigTest, RemoteGeneratorDefaultsTheVocabularySize) {
  ASSERT_OK_AND_ASSIGN(CliConfig config,
                       ParseCliConfig("[generator]\nkind = \"remote\"\n", "/"));
  EXPECT_EQ(config.ToRunConfig().vocabulary_size, 50272);
  EXPECT_EQ(config.ToExperimentConfig().vocabulary_size, 50272);
  config.vocabulary_size = 32000;
  EXPECT_EQ(config.ToRunConfig().vocabulary_size, 32000);
  config.generator.kind = GeneratorKind::kNgram;
  config.vocabulary_size.reset();
  EXPECT_EQ(config.ToRunConfig().vocabulary_size, std::nullopt);
}

TEST(ExitCodeTest, MapsStatusCodes) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), kExitOk);
  EXPECT_EQ(ExitCodeFor(absl::OutOfRangeError("")), kExitInfeasible);
  EXPECT_EQ(ExitCodeFor(absl::UnavailableError("")), kExitBackend);
  EXPECT_EQ(ExitCodeFor(absl::DeadlineExceededError("")), kExitBackend);
  EXPECT_EQ(ExitCodeFor(absl::NotFoundError("")), kExitData);
  EXPECT_EQ(ExitCodeFor(absl::FailedPreconditionError("")), kExitData);
}

}  // namespace
}  // namespace dprag
