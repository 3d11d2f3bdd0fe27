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

#include "dprag/data_io.h"

#include <filesystem>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dprag {
namespace {

using ::dprag::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

class DataIoTest : public ::testing::Test {
 protected:
  DataIoTest()
      : dir_(std::filesystem::path(::testing::TempDir()) / "data_io_test") {
    std::filesystem::remove_all(dir_);
  }

  std::filesystem::path Write(const std::string& name,
                              const std::string& contents) {
    const std::filesystem::path path = dir_ / name;
    EXPECT_OK(WriteFile(path, contents));
    return path;
  }

  std::filesystem::path dir_;
};

TEST_F(DataIoTest, FileRoundTrip) {
  const std::filesystem::path path = Write("nested/a.txt", "hello\n");
  ASSERT_OK_AND_ASSIGN(const std::string contents, ReadFile(path));
  EXPECT_EQ(contents, "hello\n");
  EXPECT_THAT(ReadFile(dir_ / "missing.txt"),
              StatusIs(absl::StatusCode::kNotFound));
}

TEST_F(DataIoTest, LoadsCorpus) {
  const auto path = Write(
      "corpus.jsonl", R"({"doc_id": "a", "text": "alpha", "owner_id": "p1"})"
                      "\n\n"
                      R"({"doc_id": "b", "text": "beta"})"
                      "\n");
  ASSERT_OK_AND_ASSIGN(const std::vector<Document> docs, LoadCorpus(path));
  EXPECT_THAT(docs, ElementsAre(Document{"a", "alpha", "p1"},
                                Document{"b", "beta", "b"}));
}

TEST_F(DataIoTest, CorpusErrorsNameTheLine) {
  const auto path = Write("bad.jsonl", R"({"doc_id": "a", "text": "alpha"})"
                                       "\n"
                                       R"({"doc_id": "b"})"
                                       "\n");
  EXPECT_THAT(LoadCorpus(path),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("bad.jsonl:2: missing string field 'text'")));
  const auto garbage = Write("garbage.jsonl", "not json\n");
  EXPECT_THAT(LoadCorpus(garbage), StatusIs(absl::StatusCode::kInvalidArgument,
                                            HasSubstr("garbage.jsonl:1:")));
}

TEST_F(DataIoTest, LoadsQuestions) {
  const auto path =
      Write("questions.jsonl",
            R"({"question": "Capital of France?", "answers": ["Paris"]})"
            "\n");
  ASSERT_OK_AND_ASSIGN(const std::vector<QaExample> questions,
                       LoadQuestions(path));
  ASSERT_EQ(questions.size(), 1u);
  EXPECT_EQ(questions[0].question, "Capital of France?");
  EXPECT_THAT(questions[0].answers, ElementsAre("Paris"));

  const auto empty =
      Write("empty_answers.jsonl", R"({"question": "q", "answers": []})"
                                   "\n");
  EXPECT_THAT(LoadQuestions(empty),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST_F(DataIoTest, LoadsMiaSets) {
  const auto path = Write(
      "mia.jsonl",
      R"({"doc_id": "m1", "text": "cough ### rest", "membership": "in"})"
      "\n"
      R"({"doc_id": "m2", "text": "fever ### water", "membership": false})"
      "\n");
  ASSERT_OK_AND_ASSIGN(const std::vector<MiaExample> examples,
                       LoadMiaSet(path));
  ASSERT_EQ(examples.size(), 2u);
  EXPECT_EQ(examples[0].membership, Membership::kIn);
  EXPECT_EQ(examples[0].query_part, "cough");
  EXPECT_EQ(examples[1].membership, Membership::kOut);
  EXPECT_EQ(examples[1].ground_truth_answer, "water");

  EXPECT_THAT(LoadMiaSet(path, Membership::kIn),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("mia.jsonl:2: membership contradicts")));

  const auto implicit =
      Write("implicit.jsonl", R"({"doc_id": "m3", "text": "a ### b"})"
                              "\n");
  EXPECT_THAT(LoadMiaSet(implicit),
              StatusIs(absl::StatusCode::kInvalidArgument));
  ASSERT_OK_AND_ASSIGN(const std::vector<MiaExample> members,
                       LoadMiaSet(implicit, Membership::kIn));
  EXPECT_EQ(members[0].membership, Membership::kIn);

  const auto no_delimiter = Write(
      "nodelim.jsonl", R"({"doc_id": "m4", "text": "ab", "membership": "in"})"
                       "\n");
  EXPECT_THAT(LoadMiaSet(no_delimiter),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST_F(DataIoTest, LoadsTrainingTexts) {
  const auto plain = Write("training.txt", "first line\n\n  \nsecond line\n");
  EXPECT_THAT(*LoadTrainingTexts(plain),
              ElementsAre("first line", "second line"));
  const auto jsonl = Write("training.jsonl", R"({"text": "one"})"
                                             "\n"
                                             R"({"text": "two"})"
                                             "\n");
  EXPECT_THAT(*LoadTrainingTexts(jsonl), ElementsAre("one", "two"));
}

TEST(RocCsvTest, OneRowPerPoint) {
  RocCurve curve;
  curve.points = {{0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}};
  EXPECT_EQ(RocCsv(curve),
            "fpr,tpr\n0.000000,0.000000\n0.500000,1.000000\n"
            "1.000000,1.000000\n");
}

}  // namespace
}  // namespace dprag
