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

#ifndef MRFORGE_TTM_H_
#define MRFORGE_TTM_H_

#include <string>
#include <string_view>
#include <vector>

#include "mrforge/lexicon.h"
#include "mrforge/mr.h"

namespace mrforge {

// A matched surface phrase. begin/end are byte offsets into the normalized
// utterance (see NormalizeUtterance).
struct AlignmentSpan {
  std::string attribute;  // "recommend" for RECOMMEND cues
  std::string value;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string pattern;
  bool in_domain = true;
  bool negated = false;

  bool operator==(const AlignmentSpan &) const = default;
};

struct ErrorCounts {
  int deletions = 0;
  int repetitions = 0;
  int substitutions = 0;
  int hallucinations = 0;
  int slots = 0;  // N, including the RECOMMEND pseudo-slot

  int errors() const { return deletions + repetitions + substitutions + hallucinations; }
  bool perfect() const { return errors() == 0; }

  bool operator==(const ErrorCounts &) const = default;
  std::string ToString() const;
};

struct RetrofitResult {
  // One slot per realized attribute, first span wins, canonical order. May
  // carry out-of-domain values; see invalid_value_flag.
  MeaningRepresentation retrofit_mr;
  std::vector<AlignmentSpan> spans;  // in text order
  bool repetition_flag = false;
  bool invalid_value_flag = false;
};

// Finds every non-overlapping lexicon match. Overlaps are resolved by
// precedence, then longer match, then leftmost. Negation cues within the
// lexicon's window before a negatable match flip its value; the window
// stops at sentence boundaries. The utterance is normalized first.
std::vector<AlignmentSpan> Align(std::string_view utterance, const Lexicon &lexicon);

RetrofitResult ExtractMr(std::string_view utterance, const Lexicon &lexicon);

// D: input slots with no span. S: input slots whose first span has another
// value. R: spans beyond the first for any attribute. H: realized
// attributes absent from the input. N counts RECOMMEND as a slot.
ErrorCounts ClassifyErrors(const MeaningRepresentation &input,
                           const RetrofitResult &result, const Ontology &ontology);

// Value equality under the attribute's canonical spelling; open and
// unknown values compare after normalization.
bool SameValue(const Ontology &ontology, std::string_view attribute,
               std::string_view a, std::string_view b);

}  // namespace mrforge

#endif  // MRFORGE_TTM_H_
