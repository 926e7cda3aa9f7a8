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

#include "cli.h"

#include <fmt/format.h>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrforge/corpus.h"
#include "mrforge/error.h"
#include "mrforge/generator.h"
#include "mrforge/lexicon.h"
#include "mrforge/metrics.h"
#include "mrforge/mr.h"
#include "mrforge/ontology.h"
#include "mrforge/selftrain.h"
#include "mrforge/testgen.h"
#include "mrforge/text.h"
#include "mrforge/ttm.h"
#include "mrforge/version.h"
#include "mrforge/wire.h"

namespace mrforge {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Common {
  std::string ontology_path;
  std::string lexicon_path;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string manifest_path;
};

// Ontology and lexicon for one invocation; the lexicon points into the
// ontology, so both live here.
struct Model {
  std::unique_ptr<Ontology> owned_ontology;
  std::unique_ptr<Lexicon> owned_lexicon;
  const Ontology *ontology = nullptr;
  const Lexicon *lexicon = nullptr;
};

Model LoadModel(const Common &common) {
  Model m;
  if (common.ontology_path.empty() && common.lexicon_path.empty()) {
    m.ontology = &DefaultOntology();
    m.lexicon = &DefaultLexicon();
    return m;
  }
  if (common.ontology_path.empty()) {
    m.ontology = &DefaultOntology();
  } else {
    m.owned_ontology =
        std::make_unique<Ontology>(ParseOntology(ReadFileOrThrow(common.ontology_path)));
    m.ontology = m.owned_ontology.get();
  }
  std::string text = common.lexicon_path.empty() ? std::string(DefaultLexiconText())
                                                 : ReadFileOrThrow(common.lexicon_path);
  m.owned_lexicon = std::make_unique<Lexicon>(Lexicon::Parse(text, *m.ontology));
  m.lexicon = m.owned_lexicon.get();
  return m;
}

// Records of a line-oriented file; a final newline does not open a record.
std::vector<std::string> ReadLines(const std::string &path) {
  std::string text = ReadFileOrThrow(path);
  std::vector<std::string> lines = Split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (std::string &line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  return lines;
}

std::vector<MeaningRepresentation> ReadMrFile(const std::string &path, const Ontology &ontology) {
  std::vector<MeaningRepresentation> mrs;
  std::vector<std::string> lines = ReadLines(path);
  mrs.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      MeaningRepresentation mr = ParseMr(lines[i], ontology);
      ValidityReport report = ValidateMr(mr, ontology);
      if (!report.ok()) throw DataError(report.ToString());
      mrs.push_back(Canonicalize(mr, ontology));
    } catch (const ParseError &e) {
      throw ParseError(fmt::format("{}:{}: {}", path, i + 1, e.what()), e.position(), i + 1);
    } catch (const DataError &e) {
      throw DataError(fmt::format("{}:{}: {}", path, i + 1, e.what()));
    }
  }
  return mrs;
}

std::string JoinLines(const std::vector<std::string> &lines) {
  std::string out;
  for (const std::string &line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

// Writes through a sibling temporary so a failed run leaves no torn file.
void WriteFile(const std::string &path, const std::string &content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw DataError("cannot write '" + path + "'");
  }
  fs::rename(tmp, path);
}

std::string Fingerprint(const std::string &path) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : ReadFileOrThrow(path)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

std::string UtcNow() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string> &args, const Common &common)
      : started_(UtcNow()) {
    j_["command"] = std::move(command);
    j_["argv"] = args;
    j_["version"] = kVersion;
    j_["config"] = {{"ontology", common.ontology_path.empty() ? "builtin" : common.ontology_path},
                    {"lexicon", common.lexicon_path.empty() ? "builtin" : common.lexicon_path}};
    if (const char *env = std::getenv("MRFORGE_CONFIG")) j_["config"]["file"] = env;
    j_["seeds"] = {{"root", common.seed}};
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
  }

  void Input(const std::string &path) {
    j_["inputs"].push_back({{"path", path}, {"fingerprint", Fingerprint(path)}});
  }
  void Output(const std::string &path) { j_["outputs"].push_back(path); }
  void Seed(const std::string &label, std::uint64_t value) { j_["seeds"][label] = value; }
  void Param(const std::string &key, json value) { j_["params"][key] = std::move(value); }

  void Write(const std::string &path) {
    j_["started"] = started_;
    j_["finished"] = UtcNow();
    WriteFile(path, j_.dump(2) + "\n");
  }

 private:
  json j_;
  std::string started_;
};

std::string ManifestFor(const Common &common, const std::string &output) {
  if (!common.manifest_path.empty()) return common.manifest_path;
  if (fs::is_directory(output)) return (fs::path(output) / "manifest.json").string();
  return output + ".manifest.json";
}

json ErrorsJson(const ErrorCounts &e) {
  return {{"D", e.deletions},
          {"R", e.repetitions},
          {"S", e.substitutions},
          {"H", e.hallucinations},
          {"N", e.slots}};
}

json SummaryJson(const Summary &s) {
  return {{"items", s.count}, {"ser", s.ser},          {"perfect", s.perfect},
          {"sb", s.sb},       {"perfect_count", s.perfect_count}, {"sb_count", s.sb_count}};
}

json ItemJson(std::size_t index, const ScoredItem &item) {
  return {{"index", index},
          {"mr", FormatMr(item.input)},
          {"utterance", item.utterance},
          {"retrofit", FormatMr(item.result.retrofit_mr)},
          {"errors", ErrorsJson(item.errors)},
          {"ser", item.ser.value()},
          {"perfect", item.perfect},
          {"sb", item.sb},
          {"repetition", item.result.repetition_flag},
          {"invalid_value", item.result.invalid_value_flag}};
}

std::string BreakdownTsv(const std::vector<BreakdownRow> &rows) {
  std::string out =
      "length\tn\tser\tperfect\tsb\tn_rec\tser_rec\tperfect_rec\tsb_rec\t"
      "n_norec\tser_norec\tperfect_norec\tsb_norec\n";
  for (const BreakdownRow &r : rows) {
    out += fmt::format("{}", r.length);
    for (const Summary *s : {&r.all, &r.rec, &r.no_rec}) {
      out += fmt::format("\t{}\t{:.6f}\t{:.4f}\t{:.6f}", s->count, s->ser, s->perfect, s->sb);
    }
    out += '\n';
  }
  return out;
}

// Sends every MR to the generator; any failed item is an endpoint error.
std::vector<std::string> GenerateAll(Generator &generator,
                                     const std::vector<MeaningRepresentation> &mrs,
                                     SupervisionMode supervision, const std::string &prefix) {
  std::vector<GenerationRequest> requests;
  requests.reserve(mrs.size());
  for (std::size_t i = 0; i < mrs.size(); ++i) {
    requests.push_back({fmt::format("{}{:05d}", prefix, i), mrs[i], supervision});
  }
  std::vector<GenerationResult> results = generator.Generate(requests);
  std::vector<std::string> texts;
  texts.reserve(results.size());
  long failed = 0;
  std::string first;
  for (const GenerationResult &r : results) {
    if (r.ok()) {
      texts.push_back(*r.text);
    } else if (failed++ == 0) {
      first = r.id + ": " + r.error;
    }
  }
  if (failed > 0) {
    throw EndpointError(fmt::format("{} of {} requests failed (first {})", failed, results.size(),
                                    first));
  }
  return texts;
}

std::map<std::string, SupervisionMode> SupervisionChoices() {
  return {{"nosup", SupervisionMode::kNosup},
          {"attr", SupervisionMode::kAttr},
          {"bool", SupervisionMode::kBool},
          {"guide", SupervisionMode::kGuideHint}};
}

std::map<std::string, Regime> RegimeChoices() {
  return {{"s-repeat", Regime::kRepeat}, {"s-unique", Regime::kUnique}};
}

struct MergeArgs {
  std::string nyc, e2e, map, output;
};

int Merge(const MergeArgs &a, const Common &common, const std::vector<std::string> &argv,
          std::ostream &out) {
  Manifest manifest("merge", argv, common);
  auto read = [&](const std::string &path, std::string_view fallback) {
    if (path.empty()) return std::string(fallback);
    manifest.Input(path);
    return ReadFileOrThrow(path);
  };
  SourceOntology nyc = ParseSourceOntology(read(a.nyc, DefaultNycDescriptor()));
  SourceOntology e2e = ParseSourceOntology(read(a.e2e, DefaultE2eDescriptor()));
  AttributeMap map = AttributeMap::Parse(read(a.map, DefaultAttributeMap()));
  std::string dumped = DumpOntology(MergeOntologies(nyc, e2e, map));
  if (a.output.empty()) {
    out << dumped;
    return kExitOk;
  }
  WriteFile(a.output, dumped);
  manifest.Output(a.output);
  manifest.Write(ManifestFor(common, a.output));
  return kExitOk;
}

struct BuildCorpusArgs {
  std::string e2e, nyc, map, output, rejections;
  bool no_delex = false;
  bool no_balance = false;
};

int BuildCorpusCommand(const BuildCorpusArgs &a, const Common &common,
                       const std::vector<std::string> &argv, std::ostream &out) {
  Model model = LoadModel(common);
  Manifest manifest("build-corpus", argv, common);
  AttributeMap map = AttributeMap::Parse(a.map.empty() ? std::string(DefaultAttributeMap())
                                                       : ReadFileOrThrow(a.map));
  if (!a.map.empty()) manifest.Input(a.map);

  std::vector<std::string> rejected;
  auto load = [&](const std::string &path, CorpusFormat format, Source source) {
    manifest.Input(path);
    IngestResult ingested = IngestSource(path, format);
    for (const RowError &e : ingested.errors) {
      rejected.push_back(fmt::format("{}:{}\t{}", path, e.line, e.message));
    }
    RelabelResult relabeled = RelabelToCombined(ingested.pairs, source, map, *model.ontology);
    for (const Rejection &r : relabeled.rejections) {
      rejected.push_back(fmt::format("{}:{}\t{}", path, r.line, r.reason));
    }
    std::vector<TrainingInstance> instances;
    long unmatched = 0;
    for (const TrainingInstance &inst : relabeled.instances) {
      instances.push_back(a.no_delex ? inst : Delexicalize(inst, *model.ontology));
      if (instances.back().flagged) ++unmatched;
    }
    out << fmt::format("{}: {} rows, {} kept, {} rejected, {} with unmatched values\n", path,
                       ingested.rows, instances.size(),
                       ingested.errors.size() + relabeled.rejections.size(), unmatched);
    return instances;
  };
  std::vector<TrainingInstance> e2e =
      a.e2e.empty() ? std::vector<TrainingInstance>{}
                    : load(a.e2e, CorpusFormat::kE2eCsv, Source::kE2e);
  std::vector<TrainingInstance> nyc =
      a.nyc.empty() ? std::vector<TrainingInstance>{}
                    : load(a.nyc, CorpusFormat::kNycTsv, Source::kNyc);
  if (e2e.empty() && nyc.empty()) throw DataError("build-corpus: no usable instances");

  std::vector<TrainingInstance> instances;
  if (a.no_balance) {
    instances = nyc;
    instances.insert(instances.end(), e2e.begin(), e2e.end());
  } else {
    instances = BuildBalancedTrain(nyc, e2e, common.seed).instances;
  }
  manifest.Param("balanced", !a.no_balance);
  manifest.Param("delexicalized", !a.no_delex);

  std::string body;
  for (const TrainingInstance &inst : instances) body += InstanceToJson(inst) + "\n";
  WriteFile(a.output, body);
  manifest.Output(a.output);
  if (!a.rejections.empty()) {
    WriteFile(a.rejections, JoinLines(rejected));
    manifest.Output(a.rejections);
  }
  manifest.Write(ManifestFor(common, a.output));
  out << fmt::format("wrote {} instances to {}\n", instances.size(), a.output);
  return kExitOk;
}

struct GenTestArgs {
  TestGenConfig config;
  std::vector<std::string> exclude;
  std::string output;
  std::string stats;
};

int GenTest(GenTestArgs a, const Common &common, const std::vector<std::string> &argv,
            std::ostream &out) {
  Model model = LoadModel(common);
  Manifest manifest("gen-test", argv, common);
  a.config.seed = common.seed;
  std::set<std::string> exclude;
  for (const std::string &path : a.exclude) {
    manifest.Input(path);
    for (const MeaningRepresentation &mr : ReadMrFile(path, *model.ontology)) {
      exclude.insert(FormatMr(mr));
    }
  }
  std::vector<MeaningRepresentation> mrs =
      GenerateComTestset(*model.ontology, a.config, exclude);
  std::vector<std::string> lines;
  lines.reserve(mrs.size());
  for (const MeaningRepresentation &mr : mrs) lines.push_back(FormatMr(mr));
  TestsetStats stats = ComputeTestsetStats(mrs);

  manifest.Param("size", a.config.size);
  manifest.Param("length", {a.config.length_min, a.config.length_max, a.config.length_mean,
                            a.config.length_stddev});
  manifest.Param("recommend_fraction", a.config.recommend_fraction);
  WriteFile(a.output, JoinLines(lines));
  manifest.Output(a.output);
  if (!a.stats.empty()) {
    WriteFile(a.stats, stats.ToString());
    manifest.Output(a.stats);
  }
  manifest.Write(ManifestFor(common, a.output));
  out << stats.ToString();
  return kExitOk;
}

struct GenerateArgs {
  std::string mrs, endpoint = "template", output;
  SupervisionMode supervision = SupervisionMode::kNosup;
};

int GenerateCommand(const GenerateArgs &a, const Common &common,
                    const std::vector<std::string> &argv, std::ostream &out) {
  Model model = LoadModel(common);
  Manifest manifest("generate", argv, common);
  std::vector<MeaningRepresentation> mrs = ReadMrFile(a.mrs, *model.ontology);
  manifest.Input(a.mrs);
  std::unique_ptr<Generator> generator = OpenEndpoint(a.endpoint, *model.lexicon);
  std::vector<std::string> texts = GenerateAll(*generator, mrs, a.supervision, "g-");
  for (std::string &t : texts) {
    if (t.find('\n') != std::string::npos) t = CollapseWhitespace(t);
  }
  manifest.Param("endpoint", a.endpoint);
  manifest.Param("generator", generator->Describe());
  manifest.Param("supervision", SupervisionName(a.supervision));
  WriteFile(a.output, JoinLines(texts));
  manifest.Output(a.output);
  manifest.Write(ManifestFor(common, a.output));
  out << fmt::format("generated {} utterances with {}\n", texts.size(), generator->Describe());
  return kExitOk;
}

struct ExtractArgs {
  std::string utterances, output;
  bool json = false;
};

int ExtractCommand(const ExtractArgs &a, const Common &common,
                   const std::vector<std::string> &argv, std::ostream &out) {
  Model model = LoadModel(common);
  Manifest manifest("extract", argv, common);
  std::vector<std::string> utterances = ReadLines(a.utterances);
  manifest.Input(a.utterances);
  std::vector<std::string> lines;
  lines.reserve(utterances.size());
  for (const std::string &u : utterances) {
    RetrofitResult r = ExtractMr(u, *model.lexicon);
    if (!a.json) {
      lines.push_back(FormatMr(r.retrofit_mr));
      continue;
    }
    json spans = json::array();
    for (const AlignmentSpan &s : r.spans) {
      spans.push_back({{"attribute", s.attribute},
                       {"value", s.value},
                       {"begin", s.begin},
                       {"end", s.end},
                       {"negated", s.negated},
                       {"in_domain", s.in_domain}});
    }
    lines.push_back(json{{"utterance", u},
                         {"retrofit", FormatMr(r.retrofit_mr)},
                         {"spans", spans},
                         {"repetition", r.repetition_flag},
                         {"invalid_value", r.invalid_value_flag}}
                        .dump());
  }
  WriteFile(a.output, JoinLines(lines));
  manifest.Output(a.output);
  manifest.Write(ManifestFor(common, a.output));
  out << fmt::format("extracted {} meaning representations\n", lines.size());
  return kExitOk;
}

struct EvaluateArgs {
  std::string mrs, utterances, endpoint, report;
  SupervisionMode supervision = SupervisionMode::kNosup;
};

int EvaluateCommand(const EvaluateArgs &a, const Common &common,
                    const std::vector<std::string> &argv, std::ostream &out) {
  Model model = LoadModel(common);
  Manifest manifest("evaluate", argv, common);
  std::vector<MeaningRepresentation> mrs = ReadMrFile(a.mrs, *model.ontology);
  manifest.Input(a.mrs);
  std::vector<std::string> utterances;
  if (!a.utterances.empty()) {
    utterances = ReadLines(a.utterances);
    manifest.Input(a.utterances);
    if (utterances.size() != mrs.size()) {
      throw DataError(fmt::format("{} has {} records but {} has {}", a.mrs, mrs.size(),
                                  a.utterances, utterances.size()));
    }
  } else {
    std::unique_ptr<Generator> generator = OpenEndpoint(a.endpoint, *model.lexicon);
    utterances = GenerateAll(*generator, mrs, a.supervision, "e-");
    manifest.Param("endpoint", a.endpoint);
    manifest.Param("generator", generator->Describe());
    manifest.Param("supervision", SupervisionName(a.supervision));
  }
  if (mrs.empty()) throw DataError(a.mrs + ": no records");

  std::vector<ScoredItem> items = ScoreAll(mrs, utterances, *model.lexicon, common.threads);
  Summary summary = Summarize(items);
  std::vector<BreakdownRow> rows = ReportBreakdowns(items);
  std::string items_text;
  for (std::size_t i = 0; i < items.size(); ++i) items_text += ItemJson(i, items[i]).dump() + "\n";
  std::string summary_text = FormatSummary(summary);
  std::string breakdown_text = FormatBreakdowns(rows);

  fs::create_directories(a.report);
  fs::path dir(a.report);
  const std::pair<const char *, std::string> files[] = {
      {"items.jsonl", items_text},
      {"summary.json", SummaryJson(summary).dump(2) + "\n"},
      {"summary.txt", summary_text},
      {"breakdown.txt", breakdown_text},
      {"breakdown.tsv", BreakdownTsv(rows)},
  };
  for (const auto &[name, content] : files) {
    WriteFile((dir / name).string(), content);
    manifest.Output((dir / name).string());
  }
  manifest.Write(ManifestFor(common, a.report));
  out << summary_text << breakdown_text;
  return kExitOk;
}

struct SelfTrainArgs {
  std::string state, corpus, testset, endpoint = "surrogate:";
  int rounds = 10;
  int pool_size = 3040;
  Regime regime = Regime::kRepeat;
  SupervisionMode supervision = SupervisionMode::kBool;
  bool resume = false;
  bool errorful_only = false;
};

int SelfTrainCommand(const SelfTrainArgs &a, const Common &common,
                     const std::vector<std::string> &argv, std::ostream &out) {
  Model model = LoadModel(common);
  Manifest manifest("selftrain", argv, common);
  bool has_reports = !ReadRoundReports(a.state).empty();
  if (has_reports && !a.resume) {
    throw ConfigError("state directory " + a.state + " already holds a run; pass --resume");
  }
  std::vector<TrainingInstance> corpus;
  std::vector<MeaningRepresentation> testset;
  if (!(a.resume && has_reports)) {
    if (a.corpus.empty() || a.testset.empty()) {
      throw ConfigError("selftrain needs --corpus and --testset to start a run");
    }
    corpus = ReadInstances(a.corpus, *model.ontology);
    manifest.Input(a.corpus);
    testset = ReadMrFile(a.testset, *model.ontology);
    manifest.Input(a.testset);
  }
  std::unique_ptr<Generator> generator = OpenEndpoint(a.endpoint, *model.lexicon);

  SelfTrainConfig config;
  config.state_dir = a.state;
  config.rounds = a.rounds;
  config.regime = a.regime;
  config.supervision = a.supervision;
  config.seed = common.seed;
  config.pool.size = a.pool_size;
  config.policy.errorful_only = a.errorful_only;
  config.threads = common.threads;
  manifest.Param("endpoint", a.endpoint);
  manifest.Param("generator", generator->Describe());
  manifest.Param("rounds", a.rounds);
  manifest.Param("regime", RegimeName(a.regime));
  manifest.Param("supervision", SupervisionName(a.supervision));
  manifest.Param("pool_size", a.pool_size);
  manifest.Param("resume", a.resume);

  std::vector<RoundReport> reports =
      RunSelfTraining(corpus, *generator, testset, config, *model.lexicon, a.resume, &out);
  manifest.Output(a.state);
  manifest.Write(ManifestFor(common, a.state));
  out << FormatRoundReports(reports);
  return kExitOk;
}

struct ReportArgs {
  std::string state, series;
};

int ReportCommand(const ReportArgs &a, const Common &common, const std::vector<std::string> &argv,
                  std::ostream &out) {
  std::vector<RoundReport> reports = ReadRoundReports(a.state);
  if (reports.empty()) throw DataError(a.state + ": no completed rounds");
  out << FormatRoundReports(reports);
  if (a.series.empty()) return kExitOk;
  std::string tsv = "round\tadded\tcorpus\tser\tperfect\tsb\n";
  for (const RoundReport &r : reports) {
    tsv += fmt::format("{}\t{}\t{}\t{:.6f}\t{:.4f}\t{:.6f}\n", r.round, r.added, r.corpus_size,
                       r.test.ser, r.test.perfect, r.test.sb);
  }
  Manifest manifest("report", argv, common);
  WriteFile(a.series, tsv);
  manifest.Output(a.series);
  manifest.Write(ManifestFor(common, a.series));
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"mrforge: combined-ontology NLG evaluation and self-training toolkit", "mrforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML/INI file of option defaults");

  Common common;
  app.add_option("--ontology", common.ontology_path, "Combined ontology YAML")
      ->check(CLI::ExistingFile);
  app.add_option("--lexicon", common.lexicon_path, "Lexicon YAML")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Root seed");
  app.add_option("--threads", common.threads, "Scoring threads")->check(CLI::Range(1, 256));
  app.add_option("--manifest", common.manifest_path, "Run manifest path");

  auto supervision = [](CLI::App *sub, SupervisionMode *target) {
    sub->add_option("--supervision", *target, "nosup, attr, bool or guide")
        ->transform(CLI::CheckedTransformer(SupervisionChoices(), CLI::ignore_case));
  };

  MergeArgs merge;
  CLI::App *merge_cmd = app.add_subcommand("merge", "Merge the NYC and E2E ontologies");
  merge_cmd->add_option("--nyc", merge.nyc, "NYC descriptor YAML")->check(CLI::ExistingFile);
  merge_cmd->add_option("--e2e", merge.e2e, "E2E descriptor YAML")->check(CLI::ExistingFile);
  merge_cmd->add_option("--map", merge.map, "Attribute rename table")->check(CLI::ExistingFile);
  merge_cmd->add_option("-o,--output", merge.output, "Output YAML (stdout if absent)");

  BuildCorpusArgs build;
  CLI::App *build_cmd = app.add_subcommand("build-corpus", "Relabel and balance source corpora");
  build_cmd->add_option("--e2e", build.e2e, "E2E CSV")->check(CLI::ExistingFile);
  build_cmd->add_option("--nyc", build.nyc, "NYC TSV")->check(CLI::ExistingFile);
  build_cmd->add_option("--map", build.map, "Attribute rename table")->check(CLI::ExistingFile);
  build_cmd->add_option("-o,--output", build.output, "Output JSONL")->required();
  build_cmd->add_option("--rejections", build.rejections, "Rejected rows report");
  build_cmd->add_flag("--no-delex", build.no_delex, "Keep names and points of interest");
  build_cmd->add_flag("--no-balance", build.no_balance, "Keep every instance");

  GenTestArgs gen;
  CLI::App *gen_cmd = app.add_subcommand("gen-test", "Generate a combined-ontology test set");
  gen_cmd->add_option("--size", gen.config.size, "Number of MRs")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--length-min", gen.config.length_min);
  gen_cmd->add_option("--length-max", gen.config.length_max);
  gen_cmd->add_option("--length-mean", gen.config.length_mean);
  gen_cmd->add_option("--length-sd", gen.config.length_stddev);
  gen_cmd->add_option("--recommend-fraction", gen.config.recommend_fraction)
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--exclude", gen.exclude, "MR files whose MRs must not recur")
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("-o,--output", gen.output, "Output MR file")->required();
  gen_cmd->add_option("--stats", gen.stats, "Statistics report");

  GenerateArgs generate;
  CLI::App *generate_cmd = app.add_subcommand("generate", "Realize MRs through a generator");
  generate_cmd->add_option("--mrs", generate.mrs, "MR file")->required()->check(
      CLI::ExistingFile);
  generate_cmd->add_option("--endpoint", generate.endpoint, "Generator endpoint spec");
  generate_cmd->add_option("-o,--output", generate.output, "Utterance file")->required();
  supervision(generate_cmd, &generate.supervision);

  ExtractArgs extract;
  CLI::App *extract_cmd = app.add_subcommand("extract", "Recover MRs from utterances");
  extract_cmd->add_option("--utterances", extract.utterances, "Utterance file")
      ->required()
      ->check(CLI::ExistingFile);
  extract_cmd->add_option("-o,--output", extract.output, "Output file")->required();
  extract_cmd->add_flag("--json", extract.json, "Emit JSONL with spans and flags");

  EvaluateArgs evaluate;
  CLI::App *evaluate_cmd = app.add_subcommand("evaluate", "Score utterances against MRs");
  evaluate_cmd->add_option("--mrs", evaluate.mrs, "MR file")->required()->check(
      CLI::ExistingFile);
  CLI::Option *utt_opt =
      evaluate_cmd->add_option("--utterances", evaluate.utterances, "Utterance file")
          ->check(CLI::ExistingFile);
  CLI::Option *ep_opt =
      evaluate_cmd->add_option("--endpoint", evaluate.endpoint, "Generator endpoint spec");
  utt_opt->excludes(ep_opt);
  evaluate_cmd->add_option("--report", evaluate.report, "Report directory")->required();
  supervision(evaluate_cmd, &evaluate.supervision);

  SelfTrainArgs st;
  CLI::App *st_cmd = app.add_subcommand("selftrain", "Run the retrofit self-training loop");
  st_cmd->add_option("--state", st.state, "State directory")->required();
  st_cmd->add_option("--corpus", st.corpus, "Initial training JSONL")->check(CLI::ExistingFile);
  st_cmd->add_option("--testset", st.testset, "Held-out MR file")->check(CLI::ExistingFile);
  st_cmd->add_option("--endpoint", st.endpoint, "Generator endpoint spec");
  st_cmd->add_option("--rounds", st.rounds, "Self-training rounds")->check(CLI::NonNegativeNumber);
  st_cmd->add_option("--size", st.pool_size, "MR pool per round")->check(CLI::PositiveNumber);
  st_cmd->add_option("--regime", st.regime, "s-repeat or s-unique")
      ->transform(CLI::CheckedTransformer(RegimeChoices(), CLI::ignore_case));
  supervision(st_cmd, &st.supervision);
  st_cmd->add_flag("--resume", st.resume, "Continue after the last completed round");
  st_cmd->add_flag("--errorful-only", st.errorful_only, "Curate only imperfect outputs");

  ReportArgs report;
  CLI::App *report_cmd = app.add_subcommand("report", "Print self-training round reports");
  report_cmd->add_option("--state", report.state, "State directory")->required()->check(
      CLI::ExistingDirectory);
  report_cmd->add_option("--series", report.series, "Per-round TSV for plotting");

  for (CLI::App *sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> full = args;
  const char *env = std::getenv("MRFORGE_CONFIG");
  bool has_config = false;
  for (const std::string &a : args) {
    if (a == "--config" || a.rfind("--config=", 0) == 0) has_config = true;
  }
  if (env != nullptr && *env != '\0' && !has_config) {
    full.insert(full.begin(), {"--config", env});
  }
  std::vector<std::string> reversed(full.rbegin(), full.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "mrforge: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*merge_cmd) return Merge(merge, common, args, out);
    if (*build_cmd) return BuildCorpusCommand(build, common, args, out);
    if (*gen_cmd) return GenTest(gen, common, args, out);
    if (*generate_cmd) return GenerateCommand(generate, common, args, out);
    if (*extract_cmd) return ExtractCommand(extract, common, args, out);
    if (*evaluate_cmd) {
      if (evaluate.utterances.empty() && evaluate.endpoint.empty()) {
        err << "mrforge: evaluate needs --utterances or --endpoint\n";
        return kExitUsage;
      }
      return EvaluateCommand(evaluate, common, args, out);
    }
    if (*st_cmd) return SelfTrainCommand(st, common, args, out);
    if (*report_cmd) return ReportCommand(report, common, args, out);
  } catch (const EndpointError &e) {
    err << "mrforge: endpoint error: " << e.what() << "\n";
    return kExitEndpoint;
  } catch (const ConfigError &e) {
    err << "mrforge: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError &e) {
    err << "mrforge: parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError &e) {
    err << "mrforge: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception &e) {
    err << "mrforge: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mrforge
