// Copyright 2026 The mrforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MRFORGE_SELFTRAIN_H_
#define MRFORGE_SELFTRAIN_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mrforge/corpus.h"
#include "mrforge/generator.h"
#include "mrforge/metrics.h"
#include "mrforge/testgen.h"

namespace mrforge {

enum class Regime { kRepeat, kUnique };

std::string_view RegimeName(Regime regime);  // "s-repeat" / "s-unique"
Regime ParseRegime(std::string_view name);   // throws ConfigError

enum class IneligibleReason { kRepetition, kInvalidValue, kNotBlended, kEmptyRetrofit };

std::string_view IneligibleReasonName(IneligibleReason reason);

struct EligibilityDecision {
  bool eligible = true;
  std::vector<IneligibleReason> reasons;
};

// Whether (retrofit MR, utterance) may be added to training.
EligibilityDecision Eligibility(const RetrofitResult &result, const Ontology &ontology);

struct CurationPolicy {
  // Also skip outputs that were already perfect for their input MR.
  bool errorful_only = false;
};

// (canonical MR string, normalized utterance); the S-Unique key.
std::string InstanceKey(const MeaningRepresentation &mr, std::string_view utterance);

struct CurationResult {
  std::vector<TrainingInstance> added;
  long eligible = 0;
  std::map<std::string, long> ineligible;  // reason name -> count
};

// Turns eligible scored outputs into SELF instances pairing the retrofit MR
// with the utterance. S_REPEAT keeps everything eligible; S_UNIQUE drops
// pairs whose key is already in `seen`. Keys of added pairs go into `seen`.
CurationResult CurateRound(const std::vector<ScoredItem> &items, Regime regime,
                           std::set<std::string> *seen, int round, const Ontology &ontology,
                           const CurationPolicy &policy = {});

struct SelfTrainConfig {
  std::string state_dir;
  int rounds = 10;
  Regime regime = Regime::kRepeat;
  SupervisionMode supervision = SupervisionMode::kBool;
  std::uint64_t seed = 1;
  // Per-round MR pool; its seed is derived per round from `seed`.
  TestGenConfig pool;
  CurationPolicy policy;
  int threads = 1;
};

struct RoundReport {
  int round = 0;
  Regime regime = Regime::kRepeat;
  long candidates = 0;
  long generation_errors = 0;
  long eligible = 0;
  long added = 0;
  long corpus_size = 0;
  long self_instances = 0;
  std::map<std::string, long> ineligible;
  Summary test;

  std::string ToJson() const;
  static RoundReport FromJson(std::string_view line);
};

std::string FormatRoundReports(const std::vector<RoundReport> &reports);

// Runs round 0 (evaluation only) and rounds 1..config.rounds, persisting
// state under config.state_dir:
//
//   params.json                   run parameters, checked on resume
//   testset.txt                   canonical held-out MRs
//   corpus/round_NNNN.jsonl       corpus after each round
//   additions/round_NNNN.jsonl    instances added in each round
//   reports.jsonl                 one line per completed round
//
// A round counts as done once its report line is written. With `resume`
// the run continues after the last reported round, replaying the latest
// corpus to the generator first; otherwise the state directory must not
// hold reports yet. A dead endpoint aborts the round with EndpointError
// and leaves committed rounds untouched. Returns all reports, including
// rounds completed by earlier runs.
std::vector<RoundReport> RunSelfTraining(const std::vector<TrainingInstance> &corpus,
                                         Generator &generator,
                                         const std::vector<MeaningRepresentation> &testset,
                                         const SelfTrainConfig &config, const Lexicon &lexicon,
                                         bool resume = false, std::ostream *log = nullptr);

// Reads reports.jsonl from a state directory (empty if absent).
std::vector<RoundReport> ReadRoundReports(const std::string &state_dir);

}  // namespace mrforge

#endif  // MRFORGE_SELFTRAIN_H_
