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

#include "mrforge/selftrain.h"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "mrforge/error.h"
#include "mrforge/text.h"

namespace mrforge {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string RoundFile(const std::string &dir, const char *sub, int round) {
  return (fs::path(dir) / sub / fmt::format("round_{:04d}.jsonl", round)).string();
}

json SummaryJson(const Summary &s) {
  return {{"items", s.count},
          {"ser", s.ser},
          {"perfect", s.perfect},
          {"perfect_count", s.perfect_count},
          {"sb", s.sb},
          {"sb_count", s.sb_count}};
}

Summary SummaryFromJson(const json &j) {
  Summary s;
  s.count = j.value("items", 0L);
  s.ser = j.value("ser", 0.0);
  s.perfect = j.value("perfect", 0.0);
  s.perfect_count = j.value("perfect_count", 0L);
  s.sb = j.value("sb", 0.0);
  s.sb_count = j.value("sb_count", 0L);
  return s;
}

json ParamsJson(const SelfTrainConfig &config, std::size_t testset_size) {
  return {{"regime", RegimeName(config.regime)},
          {"supervision", SupervisionName(config.supervision)},
          {"seed", config.seed},
          {"pool_size", config.pool.size},
          {"testset_size", testset_size},
          {"errorful_only", config.policy.errorful_only}};
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError("cannot write '" + path + "'");
}

// Scores the test set through the generator. Any failed item aborts.
Summary Evaluate(Generator &generator, const std::vector<MeaningRepresentation> &testset,
                 const SelfTrainConfig &config, const Lexicon &lexicon, int round) {
  std::vector<GenerationRequest> requests;
  requests.reserve(testset.size());
  for (std::size_t i = 0; i < testset.size(); ++i) {
    requests.push_back({fmt::format("t{}-{:05d}", round, i), testset[i], config.supervision});
  }
  std::vector<GenerationResult> results = generator.Generate(requests);
  std::vector<std::string> texts;
  texts.reserve(results.size());
  for (const GenerationResult &r : results) {
    if (!r.ok()) {
      throw EndpointError("evaluation of round " + std::to_string(round) + " failed on " +
                          r.id + ": " + r.error);
    }
    texts.push_back(*r.text);
  }
  return Summarize(ScoreAll(testset, texts, lexicon, config.threads));
}

}  // namespace

std::string_view RegimeName(Regime regime) {
  return regime == Regime::kRepeat ? "s-repeat" : "s-unique";
}

Regime ParseRegime(std::string_view name) {
  std::string n = NormalizeValue(name);
  if (n == "s-repeat" || n == "s_repeat" || n == "repeat") return Regime::kRepeat;
  if (n == "s-unique" || n == "s_unique" || n == "unique") return Regime::kUnique;
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

std::string_view IneligibleReasonName(IneligibleReason reason) {
  switch (reason) {
    case IneligibleReason::kRepetition: return "REPETITION";
    case IneligibleReason::kInvalidValue: return "INVALID_VALUE";
    case IneligibleReason::kNotBlended: return "NOT_BLENDED";
    case IneligibleReason::kEmptyRetrofit: return "EMPTY_RETROFIT";
  }
  return "?";
}

EligibilityDecision Eligibility(const RetrofitResult &result, const Ontology &ontology) {
  EligibilityDecision d;
  if (result.repetition_flag) d.reasons.push_back(IneligibleReason::kRepetition);
  bool invalid = result.invalid_value_flag || !ValidateMr(result.retrofit_mr, ontology).ok();
  if (invalid) d.reasons.push_back(IneligibleReason::kInvalidValue);
  if (!SourceBlending(result.retrofit_mr, ontology)) {
    d.reasons.push_back(IneligibleReason::kNotBlended);
  }
  if (result.retrofit_mr.slot_count() < 2) d.reasons.push_back(IneligibleReason::kEmptyRetrofit);
  d.eligible = d.reasons.empty();
  return d;
}

std::string InstanceKey(const MeaningRepresentation &mr, std::string_view utterance) {
  return FormatMr(mr) + "\t" + NormalizeUtterance(utterance);
}

CurationResult CurateRound(const std::vector<ScoredItem> &items, Regime regime,
                           std::set<std::string> *seen, int round, const Ontology &ontology,
                           const CurationPolicy &policy) {
  CurationResult out;
  for (const ScoredItem &item : items) {
    EligibilityDecision d = Eligibility(item.result, ontology);
    if (!d.eligible) {
      for (IneligibleReason r : d.reasons) ++out.ineligible[std::string(IneligibleReasonName(r))];
      continue;
    }
    ++out.eligible;
    if (policy.errorful_only && item.perfect) continue;
    TrainingInstance inst;
    inst.mr = Canonicalize(item.result.retrofit_mr, ontology);
    inst.mr.provenance = InferProvenance(inst.mr, ontology);
    inst.utterance = NormalizeUtterance(item.utterance);
    inst.source = InstanceSource::kSelf;
    inst.round = round;
    bool fresh = seen->insert(InstanceKey(inst.mr, inst.utterance)).second;
    if (regime == Regime::kUnique && !fresh) continue;
    out.added.push_back(std::move(inst));
  }
  return out;
}

std::string RoundReport::ToJson() const {
  json j;
  j["round"] = round;
  j["regime"] = RegimeName(regime);
  j["candidates"] = candidates;
  j["generation_errors"] = generation_errors;
  j["eligible"] = eligible;
  j["added"] = added;
  j["corpus_size"] = corpus_size;
  j["self_instances"] = self_instances;
  j["ineligible"] = ineligible;
  j["test"] = SummaryJson(test);
  return j.dump();
}

RoundReport RoundReport::FromJson(std::string_view line) {
  RoundReport r;
  try {
    json j = json::parse(line);
    r.round = j.at("round").get<int>();
    r.regime = ParseRegime(j.value("regime", "s-repeat"));
    r.candidates = j.value("candidates", 0L);
    r.generation_errors = j.value("generation_errors", 0L);
    r.eligible = j.value("eligible", 0L);
    r.added = j.value("added", 0L);
    r.corpus_size = j.value("corpus_size", 0L);
    r.self_instances = j.value("self_instances", 0L);
    r.ineligible = j.value("ineligible", std::map<std::string, long>{});
    r.test = SummaryFromJson(j.value("test", json::object()));
  } catch (const json::exception &e) {
    throw ParseError(std::string("bad round report: ") + e.what(), 0);
  }
  return r;
}

std::string FormatRoundReports(const std::vector<RoundReport> &reports) {
  std::string out = fmt::format("{:>5} {:>9} {:>10} {:>9} {:>7} {:>8} {:>7} {:>9} {:>6}\n",
                                "round", "regime", "candidates", "eligible", "added", "corpus",
                                "SER", "perfect%", "SB");
  for (const RoundReport &r : reports) {
    out += fmt::format("{:>5} {:>9} {:>10} {:>9} {:>7} {:>8} {:>7.3f} {:>9.2f} {:>6.3f}\n",
                       r.round, RegimeName(r.regime), r.candidates, r.eligible, r.added,
                       r.corpus_size, r.test.ser, r.test.perfect, r.test.sb);
  }
  return out;
}

std::vector<RoundReport> ReadRoundReports(const std::string &state_dir) {
  std::vector<RoundReport> reports;
  fs::path path = fs::path(state_dir) / "reports.jsonl";
  if (!fs::exists(path)) return reports;
  std::vector<std::string> lines = Split(ReadFileOrThrow(path.string()), '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (CollapseWhitespace(lines[n]).empty()) continue;
    try {
      reports.push_back(RoundReport::FromJson(lines[n]));
    } catch (const ParseError &e) {
      // A torn final line is an uncommitted round; anything earlier is damage.
      if (n + 1 < lines.size() && !CollapseWhitespace(lines[n + 1]).empty()) {
        throw ParseError(path.string() + ":" + std::to_string(n + 1) + ": " + e.what(), 0,
                         n + 1);
      }
      break;
    }
    if (reports.back().round != static_cast<int>(reports.size()) - 1) {
      throw DataError(path.string() + ": rounds out of sequence at line " +
                      std::to_string(n + 1));
    }
  }
  return reports;
}

std::vector<RoundReport> RunSelfTraining(const std::vector<TrainingInstance> &initial_corpus,
                                         Generator &generator,
                                         const std::vector<MeaningRepresentation> &testset_in,
                                         const SelfTrainConfig &config, const Lexicon &lexicon,
                                         bool resume, std::ostream *log) {
  const Ontology &ontology = lexicon.ontology();
  if (config.rounds < 0) throw ConfigError("negative round count");
  if (config.state_dir.empty()) throw ConfigError("self-training needs a state directory");
  fs::path dir(config.state_dir);
  fs::path reports_path = dir / "reports.jsonl";
  fs::path params_path = dir / "params.json";

  std::vector<RoundReport> reports;
  std::vector<MeaningRepresentation> testset = testset_in;
  std::vector<TrainingInstance> corpus;
  std::set<std::string> seen;
  json params = ParamsJson(config, testset.size());

  if (resume && fs::exists(params_path)) {
    json stored = json::parse(ReadFileOrThrow(params_path.string()));
    for (const char *key : {"regime", "supervision", "seed", "pool_size", "errorful_only"}) {
      if (stored.value(key, json()) != params[key]) {
        throw ConfigError(std::string("resume: '") + key + "' differs from the stored run");
      }
    }
    reports = ReadRoundReports(dir.string());
    testset.clear();
    for (const std::string &line : Split(ReadFileOrThrow((dir / "testset.txt").string()), '\n')) {
      if (!CollapseWhitespace(line).empty()) testset.push_back(ParseMr(line, ontology));
    }
  } else {
    if (fs::exists(reports_path) && fs::file_size(reports_path) > 0) {
      throw ConfigError("state directory " + dir.string() +
                        " already holds a run; pass resume to continue it");
    }
    fs::create_directories(dir / "corpus");
    fs::create_directories(dir / "additions");
    std::string tests;
    for (const MeaningRepresentation &mr : testset) tests += FormatMr(mr) + "\n";
    WriteText((dir / "testset.txt").string(), tests);
    WriteInstances(RoundFile(dir.string(), "corpus", 0), initial_corpus);
    WriteText(params_path.string(), params.dump(2) + "\n");
  }
  if (testset.empty()) throw DataError("self-training needs a non-empty test set");

  int last = reports.empty() ? -1 : reports.back().round;
  int base = std::max(last, 0);
  corpus = resume && last >= 0 ? ReadInstances(RoundFile(dir.string(), "corpus", base), ontology)
                               : initial_corpus;
  for (int r = 1; r <= last; ++r) {
    std::string path = RoundFile(dir.string(), "additions", r);
    if (!fs::exists(path)) continue;
    for (const TrainingInstance &inst : ReadInstances(path, ontology)) {
      seen.insert(InstanceKey(inst.mr, inst.utterance));
    }
  }
  if (last >= 1) {
    generator.Retrain({RoundFile(dir.string(), "additions", last),
                       RoundFile(dir.string(), "corpus", last), last});
  }

  std::set<std::string> test_keys;
  for (const MeaningRepresentation &mr : testset) test_keys.insert(FormatMr(mr));
  auto count_self = [&] {
    return static_cast<long>(std::count_if(corpus.begin(), corpus.end(), [](const auto &i) {
      return i.source == InstanceSource::kSelf;
    }));
  };
  auto commit = [&](const RoundReport &report) {
    std::ofstream out(reports_path, std::ios::binary | std::ios::app);
    out << report.ToJson() << '\n';
    out.flush();
    if (!out) throw DataError("cannot append to " + reports_path.string());
    reports.push_back(report);
    if (log != nullptr) {
      *log << fmt::format("round {:>2}: added {:>5}  SER {:.3f}  perfect {:.2f}%  SB {:.3f}\n",
                          report.round, report.added, report.test.ser, report.test.perfect,
                          report.test.sb);
    }
  };

  if (last < 0) {
    RoundReport report;
    report.round = 0;
    report.regime = config.regime;
    report.corpus_size = static_cast<long>(corpus.size());
    report.self_instances = count_self();
    report.test = Evaluate(generator, testset, config, lexicon, 0);
    commit(report);
    last = 0;
  }

  for (int round = last + 1; round <= config.rounds; ++round) {
    TestGenConfig pool_config = config.pool;
    pool_config.seed = DeriveSeed(config.seed, "selftrain/pool/" + std::to_string(round));
    std::vector<MeaningRepresentation> pool =
        GenerateComTestset(ontology, pool_config, test_keys);

    std::vector<GenerationRequest> requests;
    requests.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      requests.push_back({fmt::format("r{}-{:05d}", round, i), pool[i], config.supervision});
    }
    std::vector<GenerationResult> results = generator.Generate(requests);
    if (!generator.healthy()) {
      throw EndpointError("generator died during round " + std::to_string(round));
    }

    RoundReport report;
    report.round = round;
    report.regime = config.regime;
    report.candidates = static_cast<long>(pool.size());
    std::vector<MeaningRepresentation> inputs;
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!results[i].ok()) {
        ++report.generation_errors;
        continue;
      }
      inputs.push_back(pool[i]);
      texts.push_back(*results[i].text);
    }
    std::set<std::string> round_seen = seen;
    CurationResult curated = CurateRound(ScoreAll(inputs, texts, lexicon, config.threads),
                                         config.regime, &round_seen, round, ontology,
                                         config.policy);
    report.eligible = curated.eligible;
    report.ineligible = curated.ineligible;
    report.added = static_cast<long>(curated.added.size());

    std::string additions_path = RoundFile(dir.string(), "additions", round);
    std::string corpus_path = RoundFile(dir.string(), "corpus", round);
    WriteInstances(additions_path, curated.added);
    std::vector<TrainingInstance> next_corpus = corpus;
    next_corpus.insert(next_corpus.end(), curated.added.begin(), curated.added.end());
    WriteInstances(corpus_path, next_corpus);

    generator.Retrain({additions_path, corpus_path, round});
    Summary test = Evaluate(generator, testset, config, lexicon, round);

    corpus = std::move(next_corpus);
    seen = std::move(round_seen);
    report.corpus_size = static_cast<long>(corpus.size());
    report.self_instances = count_self();
    report.test = test;
    commit(report);
  }
  return reports;
}

}  // namespace mrforge
