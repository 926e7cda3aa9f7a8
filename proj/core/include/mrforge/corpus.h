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

#ifndef MRFORGE_CORPUS_H_
#define MRFORGE_CORPUS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mrforge/mr.h"
#include "mrforge/ontology.h"

namespace mrforge {

enum class CorpusFormat { kE2eCsv, kNycTsv };

// "e2e-csv" / "nyc-tsv". Throws ConfigError.
CorpusFormat ParseCorpusFormat(std::string_view name);

enum class InstanceSource { kNyc, kE2e, kSelf };

std::string_view InstanceSourceName(InstanceSource source);
InstanceSource ParseInstanceSource(std::string_view name);

struct RawPair {
  std::string mr;
  std::string utterance;
  std::size_t line = 0;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<RawPair> pairs;
  std::vector<RowError> errors;
  std::size_t rows = 0;  // data rows seen, good or bad
  std::vector<std::string> warnings;
};

// Reads one source file. E2E_CSV is two RFC 4180 columns `mr,ref` (header
// optional), one record per line. NYC_TSV is `mr<TAB>utterance`. Bad rows
// are collected; more than 5% bad rows throws DataError.
IngestResult IngestSource(const std::string &path, CorpusFormat format);
IngestResult IngestText(std::string_view text, CorpusFormat format);

struct TrainingInstance {
  MeaningRepresentation mr;
  std::string utterance;
  InstanceSource source = InstanceSource::kNyc;
  int round = 0;
  // Set when a delexicalizable value was not found in the utterance.
  bool flagged = false;

  bool operator==(const TrainingInstance &) const = default;
};

struct Rejection {
  std::size_t line = 0;
  std::string reason;
};

struct RelabelResult {
  std::vector<TrainingInstance> instances;
  std::vector<Rejection> rejections;
};

// Renames source attributes into the combined ontology and respells values
// canonically. Unknown attributes, repeated attributes and out-of-domain
// values of closed attributes without a placeholder reject the pair.
// Out-of-domain values of placeholder attributes are kept for
// Delexicalize to replace.
RelabelResult RelabelToCombined(const std::vector<RawPair> &pairs, Source source,
                                const AttributeMap &attribute_map,
                                const Ontology &ontology);

// Replaces every delexicalizable value (open attributes and out-of-domain
// values of placeholder attributes) with its placeholder in both MR and
// utterance. Matching ignores case and diacritics. Unmatched values stay
// and set `flagged`. `replaced` receives the number of slots replaced.
// Idempotent.
TrainingInstance Delexicalize(const TrainingInstance &instance, const Ontology &ontology,
                              int *replaced = nullptr);

struct Corpus {
  std::vector<TrainingInstance> instances;
  std::uint64_t seed = 0;

  long Count(InstanceSource source) const;
};

// All NYC instances followed by |nyc| E2E instances sampled without
// replacement. Throws DataError if |e2e| < |nyc|.
Corpus BuildBalancedTrain(const std::vector<TrainingInstance> &nyc,
                          const std::vector<TrainingInstance> &e2e, std::uint64_t seed);

// Line-delimited JSON: {"mr", "utterance", "source", "round", "flagged"?}.
std::string InstanceToJson(const TrainingInstance &instance);
// Throws ParseError (line 0) or DataError on an invalid record.
TrainingInstance InstanceFromJson(std::string_view line, const Ontology &ontology);

void WriteInstances(const std::string &path, const std::vector<TrainingInstance> &instances);
void AppendInstances(const std::string &path, const std::vector<TrainingInstance> &instances);
// Throws ParseError with the 1-based line number.
std::vector<TrainingInstance> ReadInstances(const std::string &path, const Ontology &ontology);

}  // namespace mrforge

#endif  // MRFORGE_CORPUS_H_
