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

#ifndef MRFORGE_METRICS_H_
#define MRFORGE_METRICS_H_

#include <string>
#include <vector>

#include "mrforge/lexicon.h"
#include "mrforge/mr.h"
#include "mrforge/ttm.h"

namespace mrforge {

// (D+R+S+H)/N kept as an exact fraction. May exceed 1.
struct SlotErrorRate {
  long errors = 0;
  long slots = 1;

  double value() const { return static_cast<double>(errors) / static_cast<double>(slots); }
  // Cross-multiplied comparison, so 2/4 == 1/2.
  bool operator==(const SlotErrorRate &other) const {
    return errors * other.slots == other.errors * slots;
  }
};

// Throws DataError when N is 0.
SlotErrorRate Ser(const ErrorCounts &counts);

// True iff at least one NYC-unique and one E2E-unique attribute are present.
// SHARED attributes, unknown ids and RECOMMEND never qualify.
bool SourceBlending(const std::vector<std::string> &attributes, const Ontology &ontology);
bool SourceBlending(const MeaningRepresentation &realized, const Ontology &ontology);

struct ScoredItem {
  MeaningRepresentation input;
  std::string utterance;
  RetrofitResult result;
  ErrorCounts errors;
  SlotErrorRate ser;
  bool perfect = false;
  bool sb = false;  // on realized attributes
};

ScoredItem ScoreItem(const MeaningRepresentation &input, std::string utterance,
                     const Lexicon &lexicon);

// Scores pairs in parallel. Output order follows input order regardless of
// `threads`. Throws DataError on a length mismatch.
std::vector<ScoredItem> ScoreAll(const std::vector<MeaningRepresentation> &inputs,
                                 const std::vector<std::string> &utterances,
                                 const Lexicon &lexicon, int threads = 1);

// Unweighted mean of per-item SER. Throws DataError on an empty list.
double CorpusSer(const std::vector<ScoredItem> &items);
// 100 * perfect / total. Throws DataError on an empty list.
double PerfectRate(const std::vector<ScoredItem> &items);
// Fraction of items whose realized attributes blend. Throws on empty.
double CorpusSb(const std::vector<ScoredItem> &items);

struct Summary {
  long count = 0;
  double ser = 0;
  double perfect = 0;  // percentage
  double sb = 0;       // fraction
  long perfect_count = 0;
  long sb_count = 0;
};

// All-zero summary for an empty list.
Summary Summarize(const std::vector<ScoredItem> &items);

struct BreakdownRow {
  int length = 0;
  Summary all;
  Summary rec;
  Summary no_rec;
};

// One row per MR length in [min_length, max_length], REC/NO-REC split.
// Items outside the range are dropped.
std::vector<BreakdownRow> ReportBreakdowns(const std::vector<ScoredItem> &items,
                                           int min_length = 3, int max_length = 10);

// Aligned plain-text renderings.
std::string FormatSummary(const Summary &summary);
std::string FormatBreakdowns(const std::vector<BreakdownRow> &rows);

}  // namespace mrforge

#endif  // MRFORGE_METRICS_H_
