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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dprag/accountant.h"
#include "dprag/config.h"
#include "dprag/data_io.h"
#include "dprag/engine.h"
#include "dprag/evaluation.h"
#include "dprag/experiment.h"
#include "dprag/retrieval.h"
#include "dprag/string_compat.h"
#include "dprag/trace_io.h"

namespace dprag {
namespace {

namespace fs = std::filesystem;

// Flags that override the config file. Unset flags leave it alone.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> corpus;
  std::optional<std::string> questions;
  std::optional<std::string> algorithm;
  std::optional<int> m;
  std::optional<int> k;
  std::optional<double> tau;
  std::optional<double> epsilon_token;
  std::optional<double> delta_token;
  std::optional<double> epsilon_total;
  std::optional<double> delta_total;
  std::optional<int> t_max_cap;
  std::optional<uint64_t> seed;
  std::optional<int64_t> vocabulary_size;
  std::optional<std::string> output_dir;
  std::optional<std::string> generator;
  std::optional<std::string> scripted_table;
  std::optional<std::string> ngram_training;
  std::optional<int> ngram_order;
  std::optional<std::string> remote_endpoint;
  std::optional<std::string> remote_model;
  std::vector<std::string> algorithms;
  std::vector<double> epsilon_totals;
  std::vector<double> epsilon_tokens;
  std::vector<int> ms;
  std::optional<int> repetitions;
  std::optional<int> jobs;
};

void AddRunFlags(CLI::App* command, Flags* flags) {
  command->add_option("--config", flags->config, "TOML config file");
  command->add_option("--corpus", flags->corpus, "Corpus JSONL");
  command->add_option("--algorithm", flags->algorithm,
                      "non-rag, vote-rag, dp-vote-rag or dp-sparse-vote-rag");
  command->add_option("--m", flags->m, "Number of voters");
  command->add_option("--k", flags->k, "Documents per voter");
  command->add_option("--tau", flags->tau, "Sparse-vector threshold");
  command->add_option("--epsilon-token", flags->epsilon_token);
  command->add_option("--delta-token", flags->delta_token);
  command->add_option("--epsilon-total", flags->epsilon_total);
  command->add_option("--delta-total", flags->delta_total);
  command->add_option("--t-max-cap", flags->t_max_cap, "Output token cap");
  command->add_option("--seed", flags->seed);
  command->add_option("--vocabulary-size", flags->vocabulary_size,
                      "|V| for the LimitedDomain cutoff");
  command->add_option("--output-dir", flags->output_dir);
  command->add_option("--generator", flags->generator,
                      "scripted, ngram or remote");
  command->add_option("--scripted-table", flags->scripted_table,
                      "Scripted generator response table (JSON)");
  command->add_option("--ngram-training", flags->ngram_training,
                      "N-gram training texts");
  command->add_option("--ngram-order", flags->ngram_order);
  command->add_option("--remote-endpoint", flags->remote_endpoint);
  command->add_option("--remote-model", flags->remote_model);
  command->add_option("--jobs", flags->jobs, "Worker threads");
}

template <typename T>
void Override(const std::optional<T>& flag, T* field) {
  if (flag.has_value()) *field = *flag;
}

// Config file plus flags. InvalidArgument means a usage problem.
absl::StatusOr<CliConfig> ResolveConfig(const Flags& flags) {
  CliConfig config;
  if (flags.config.has_value()) {
    absl::StatusOr<CliConfig> loaded = LoadCliConfig(*flags.config);
    if (!loaded.ok()) return loaded.status();
    config = *std::move(loaded);
  }
  if (flags.corpus) config.corpus_path = fs::path(*flags.corpus);
  if (flags.questions) config.questions_path = fs::path(*flags.questions);
  if (flags.algorithm) {
    std::optional<Algorithm> algorithm = ParseAlgorithm(*flags.algorithm);
    if (!algorithm) {
      return absl::InvalidArgumentError(
          absl::StrCat("Unknown algorithm '", *flags.algorithm, "'"));
    }
    config.algorithm = *algorithm;
  }
  Override(flags.m, &config.m);
  Override(flags.k, &config.k);
  if (flags.tau) config.tau = flags.tau;
  Override(flags.epsilon_token, &config.epsilon_token);
  Override(flags.delta_token, &config.delta_token);
  Override(flags.epsilon_total, &config.epsilon_total);
  Override(flags.delta_total, &config.delta_total);
  Override(flags.t_max_cap, &config.t_max_cap);
  Override(flags.seed, &config.seed);
  if (flags.vocabulary_size) config.vocabulary_size = flags.vocabulary_size;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.generator) {
    absl::StatusOr<GeneratorKind> kind = ParseGeneratorKind(*flags.generator);
    if (!kind.ok()) return kind.status();
    config.generator.kind = *kind;
  }
  if (flags.scripted_table) {
    config.generator.scripted_table = fs::path(*flags.scripted_table);
  }
  if (flags.ngram_training) {
    config.generator.ngram_training = fs::path(*flags.ngram_training);
  }
  Override(flags.ngram_order, &config.generator.ngram.order);
  Override(flags.remote_endpoint, &config.generator.remote.endpoint);
  Override(flags.remote_model, &config.generator.remote.model);
  if (!flags.algorithms.empty()) {
    config.sweep_algorithms.clear();
    for (const std::string& name : flags.algorithms) {
      std::optional<Algorithm> algorithm = ParseAlgorithm(name);
      if (!algorithm) {
        return absl::InvalidArgumentError(
            absl::StrCat("Unknown algorithm '", name, "'"));
      }
      config.sweep_algorithms.push_back(*algorithm);
    }
  }
  if (!flags.epsilon_totals.empty()) {
    config.sweep_epsilon_totals = flags.epsilon_totals;
  }
  if (!flags.epsilon_tokens.empty()) {
    config.sweep_epsilon_tokens = flags.epsilon_tokens;
  }
  if (!flags.ms.empty()) config.sweep_ms = flags.ms;
  Override(flags.repetitions, &config.repetitions);
  Override(flags.jobs, &config.jobs);
  return config;
}

class Command {
 public:
  Command(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int Usage(std::string_view message) {
    err_ << "usage error: " << message << "\n";
    return kExitUsage;
  }

  int Fail(const absl::Status& status) {
    const int code = ExitCodeFor(status);
    err_ << (code == kExitInfeasible ? "infeasible: " : "error: ")
         << status.message() << "\n";
    return code;
  }

  // Config resolution and path checks; returns 0 or an exit code.
  int Resolve(const Flags& flags, CliConfig* config) {
    absl::StatusOr<CliConfig> resolved = ResolveConfig(flags);
    if (!resolved.ok()) {
      if (absl::IsInvalidArgument(resolved.status())) {
        return Usage(ToStd(resolved.status().message()));
      }
      return Fail(resolved.status());
    }
    *config = *std::move(resolved);
    if (absl::Status status = CheckPaths(*config); !status.ok()) {
      return Fail(status);
    }
    return kExitOk;
  }

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

struct AccountantFlags {
  double epsilon_token = 0.0;
  double delta_token = 1e-5;
  double epsilon_total = 0.0;
  double delta_total = 1e-4;
};

int RunAccountant(const AccountantFlags& flags, Command& command) {
  absl::StatusOr<CompositionPlan> plan =
      MaxCompositions({flags.epsilon_token, flags.delta_token},
                      {flags.epsilon_total, flags.delta_total});
  if (!plan.ok()) {
    if (absl::IsInvalidArgument(plan.status())) {
      return command.Usage(ToStd(plan.status().message()));
    }
    return command.Fail(plan.status());
  }
  command.out() << absl::StrFormat(
      "%g,%g,%g,%g,%s,%d\n", plan->per_token.epsilon, plan->per_token.delta,
      plan->total.epsilon, plan->total.delta,
      ToAbsl(CompositionRuleName(plan->rule_used)), plan->max_steps);
  return kExitOk;
}

struct Corpus {
  std::vector<Document> documents;
  std::optional<TfIdfIndex> index;
};

absl::StatusOr<Corpus> LoadIndexedCorpus(const fs::path& path) {
  Corpus corpus;
  absl::StatusOr<std::vector<Document>> documents = LoadCorpus(path);
  if (!documents.ok()) return documents.status();
  corpus.documents = *documents;
  absl::StatusOr<TfIdfIndex> index = TfIdfIndex::Build(*std::move(documents));
  if (!index.ok()) return index.status();
  corpus.index.emplace(*std::move(index));
  return corpus;
}

int RunGenerate(const Flags& flags, const std::string& question,
                Command& command) {
  CliConfig config;
  if (int code = command.Resolve(flags, &config); code != kExitOk) return code;
  const RunConfig run_config = config.ToRunConfig();
  if (absl::Status status = run_config.Validate(); !status.ok()) {
    return command.Usage(ToStd(status.message()));
  }

  Corpus corpus;
  if (config.algorithm == Algorithm::kNonRag) {
    if (config.corpus_path.has_value()) {
      command.err() << "warning: --algorithm non-rag ignores the corpus\n";
    }
  } else {
    if (!config.corpus_path.has_value()) {
      return command.Usage(absl::StrCat(ToAbsl(AlgorithmName(config.algorithm)),
                                        " needs --corpus"));
    }
    absl::StatusOr<Corpus> loaded = LoadIndexedCorpus(*config.corpus_path);
    if (!loaded.ok()) return command.Fail(loaded.status());
    corpus = *std::move(loaded);
  }

  absl::StatusOr<std::unique_ptr<Generator>> generator =
      BuildGenerator(config.generator, corpus.documents);
  if (!generator.ok()) return command.Fail(generator.status());
  const Retriever* retriever = corpus.index ? &*corpus.index : nullptr;
  absl::StatusOr<GenerationTrace> trace =
      Run(question, retriever, **generator, run_config);
  if (!trace.ok()) return command.Fail(trace.status());

  absl::StatusOr<fs::path> path =
      WriteTrace(*trace, (*generator)->vocabulary(), config.output_dir);
  if (!path.ok()) return command.Fail(path.status());
  command.out() << trace->AnswerText() << "\n";
  command.err() << "trace: " << path->string() << "\n";
  return kExitOk;
}

int RunEvalQa(const Flags& flags, Command& command) {
  CliConfig config;
  if (int code = command.Resolve(flags, &config); code != kExitOk) return code;
  ExperimentConfig experiment = config.ToExperimentConfig();
  experiment.trace_dir = config.output_dir / "traces";
  if (absl::Status status = experiment.Validate(); !status.ok()) {
    return command.Usage(ToStd(status.message()));
  }
  if (!config.questions_path.has_value()) {
    return command.Usage("eval-qa needs --questions");
  }
  bool needs_corpus = false;
  for (Algorithm algorithm : experiment.grid.algorithms) {
    needs_corpus |= algorithm != Algorithm::kNonRag;
  }
  if (needs_corpus && !config.corpus_path.has_value()) {
    return command.Usage("eval-qa with a retrieval algorithm needs --corpus");
  }

  absl::StatusOr<std::vector<QaExample>> questions =
      LoadQuestions(*config.questions_path);
  if (!questions.ok()) return command.Fail(questions.status());
  Corpus corpus;
  if (config.corpus_path.has_value()) {
    absl::StatusOr<Corpus> loaded = LoadIndexedCorpus(*config.corpus_path);
    if (!loaded.ok()) return command.Fail(loaded.status());
    corpus = *std::move(loaded);
  }
  absl::StatusOr<std::unique_ptr<Generator>> generator =
      BuildGenerator(config.generator, corpus.documents);
  if (!generator.ok()) return command.Fail(generator.status());

  const Retriever* retriever = corpus.index ? &*corpus.index : nullptr;
  absl::StatusOr<std::vector<CellResult>> cells =
      RunExperiment(experiment, *questions, retriever, **generator);
  if (!cells.ok()) return command.Fail(cells.status());
  for (const CellResult& cell : *cells) {
    for (const std::string& error : cell.errors) {
      command.err() << absl::StrFormat(
          "%s eps_total=%g eps_token=%g m=%d: %s\n",
          ToAbsl(AlgorithmName(cell.algorithm)), cell.epsilon_total,
          cell.epsilon_token, cell.m, error);
    }
  }
  const fs::path path = config.output_dir / "results.csv";
  if (absl::Status status = WriteFile(path, ResultsCsv(*cells)); !status.ok()) {
    return command.Fail(status);
  }
  command.out() << path.string() << "\n";
  return kExitOk;
}

int RunEvalMia(const Flags& flags, const std::string& in_path,
               const std::string& out_path, Command& command) {
  CliConfig config;
  if (int code = command.Resolve(flags, &config); code != kExitOk) return code;
  const RunConfig base = config.ToRunConfig();
  if (absl::Status status = base.Validate(); !status.ok()) {
    return command.Usage(ToStd(status.message()));
  }
  absl::StatusOr<std::vector<MiaExample>> members =
      LoadMiaSet(in_path, Membership::kIn);
  if (!members.ok()) return command.Fail(members.status());
  absl::StatusOr<std::vector<MiaExample>> non_members =
      LoadMiaSet(out_path, Membership::kOut);
  if (!non_members.ok()) return command.Fail(non_members.status());

  // The attacked datastore is the member set unless a corpus is given.
  Corpus corpus;
  if (config.corpus_path.has_value()) {
    absl::StatusOr<Corpus> loaded = LoadIndexedCorpus(*config.corpus_path);
    if (!loaded.ok()) return command.Fail(loaded.status());
    corpus = *std::move(loaded);
  } else {
    for (const MiaExample& example : *members) {
      corpus.documents.push_back(example.doc);
    }
    absl::StatusOr<TfIdfIndex> index = TfIdfIndex::Build(corpus.documents);
    if (!index.ok()) return command.Fail(index.status());
    corpus.index.emplace(*std::move(index));
  }
  absl::StatusOr<std::unique_ptr<Generator>> generator =
      BuildGenerator(config.generator, corpus.documents);
  if (!generator.ok()) return command.Fail(generator.status());

  std::vector<const MiaExample*> examples;
  for (const MiaExample& example : *members) examples.push_back(&example);
  for (const MiaExample& example : *non_members) examples.push_back(&example);
  std::vector<double> in_scores;
  std::vector<double> out_scores;
  std::string scores_csv = "doc_id,membership,score\n";
  for (size_t i = 0; i < examples.size(); ++i) {
    RunConfig run_config = base;
    run_config.seed = RunSeed(config.seed, i, 0);
    const AnswerFunction system =
        [&](std::string_view question) -> absl::StatusOr<std::string> {
      absl::StatusOr<GenerationTrace> trace =
          Run(question, &*corpus.index, **generator, run_config);
      if (!trace.ok()) return trace.status();
      return trace->AnswerText();
    };
    absl::StatusOr<double> score = S2MiaScore(*examples[i], system);
    if (!score.ok()) return command.Fail(score.status());
    const bool member = examples[i]->membership == Membership::kIn;
    (member ? in_scores : out_scores).push_back(*score);
    absl::StrAppendFormat(&scores_csv, "%s,%s,%.6f\n", examples[i]->doc.doc_id,
                          member ? "in" : "out", *score);
  }
  absl::StatusOr<RocCurve> roc = RocAuc(in_scores, out_scores);
  if (!roc.ok()) return command.Fail(roc.status());

  const fs::path roc_path = config.output_dir / "roc.csv";
  for (const auto& [path, contents] :
       {std::pair{roc_path, RocCsv(*roc)},
        std::pair{config.output_dir / "mia_scores.csv", scores_csv}}) {
    if (absl::Status status = WriteFile(path, contents); !status.ok()) {
      return command.Fail(status);
    }
  }
  command.out() << roc_path.string() << "\n"
                << absl::StrFormat("auc,%.6f\n", roc->auc);
  return kExitOk;
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  switch (status.code()) {
    case absl::StatusCode::kOutOfRange:
      return kExitInfeasible;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDeadlineExceeded:
      return kExitBackend;
    default:
      return kExitData;
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentially private retrieval-augmented generation",
               "dprag"};
  app.require_subcommand(1);

  AccountantFlags accountant_flags;
  CLI::App* accountant = app.add_subcommand(
      "accountant", "Maximum number of private votes for a budget");
  accountant->add_option("--epsilon-token", accountant_flags.epsilon_token)
      ->required();
  accountant->add_option("--delta-token", accountant_flags.delta_token,
                         "Default 1e-5");
  accountant->add_option("--epsilon-total", accountant_flags.epsilon_total)
      ->required();
  accountant->add_option("--delta-total", accountant_flags.delta_total,
                         "Default 1e-4");

  Flags generate_flags;
  std::string question;
  CLI::App* generate =
      app.add_subcommand("generate", "Answer one question and write a trace");
  AddRunFlags(generate, &generate_flags);
  generate->add_option("--question", question)->required();

  Flags qa_flags;
  CLI::App* eval_qa =
      app.add_subcommand("eval-qa", "Match-accuracy sweep over a grid");
  AddRunFlags(eval_qa, &qa_flags);
  eval_qa->add_option("--questions", qa_flags.questions, "Question JSONL");
  eval_qa->add_option("--algorithms", qa_flags.algorithms)->delimiter(',');
  eval_qa->add_option("--epsilon-totals", qa_flags.epsilon_totals)
      ->delimiter(',');
  eval_qa->add_option("--epsilon-tokens", qa_flags.epsilon_tokens)
      ->delimiter(',');
  eval_qa->add_option("--ms", qa_flags.ms)->delimiter(',');
  eval_qa->add_option("--repetitions", qa_flags.repetitions);

  Flags mia_flags;
  std::string in_path;
  std::string out_path;
  CLI::App* eval_mia = app.add_subcommand(
      "eval-mia", "S2MIA membership-inference ROC against one configuration");
  AddRunFlags(eval_mia, &mia_flags);
  eval_mia->add_option("--in", in_path, "Member documents (JSONL)")->required();
  eval_mia->add_option("--out", out_path, "Non-member documents (JSONL)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Command command(out, err);
  if (accountant->parsed()) return RunAccountant(accountant_flags, command);
  if (generate->parsed()) return RunGenerate(generate_flags, question, command);
  if (eval_qa->parsed()) return RunEvalQa(qa_flags, command);
  return RunEvalMia(mia_flags, in_path, out_path, command);
}

}  // namespace dprag
