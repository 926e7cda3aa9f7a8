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

#include "mrforge/ttm.h"

#include <algorithm>
#include <map>

#include "mrforge/text.h"

namespace mrforge {
namespace {

struct Candidate {
  int pattern;
  std::size_t start;
  std::size_t length;
};

// Groups spans by normalized attribute id, keeping text order.
std::map<std::string, std::vector<const AlignmentSpan *>> GroupSpans(
    const std::vector<AlignmentSpan> &spans) {
  std::map<std::string, std::vector<const AlignmentSpan *>> groups;
  for (const AlignmentSpan &span : spans) {
    groups[NormalizeValue(span.attribute)].push_back(&span);
  }
  return groups;
}

}  // namespace

std::string ErrorCounts::ToString() const {
  return "D=" + std::to_string(deletions) + " R=" + std::to_string(repetitions) +
         " S=" + std::to_string(substitutions) + " H=" + std::to_string(hallucinations) +
         " N=" + std::to_string(slots);
}

std::vector<AlignmentSpan> Align(std::string_view utterance, const Lexicon &lexicon) {
  std::string text = NormalizeUtterance(utterance);
  std::vector<Token> tokens = Tokenize(text);
  const std::vector<Pattern> &patterns = lexicon.patterns();

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::vector<int> *starting = lexicon.PatternsStartingWith(tokens[i].text);
    if (starting == nullptr) continue;
    for (int index : *starting) {
      const Pattern &p = patterns[index];
      if (i + p.tokens.size() > tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 1; k < p.tokens.size() && match; ++k) {
        match = tokens[i + k].text == p.tokens[k];
      }
      if (match) candidates.push_back({index, i, p.tokens.size()});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const Candidate &a, const Candidate &b) {
              int pa = patterns[a.pattern].precedence;
              int pb = patterns[b.pattern].precedence;
              if (pa != pb) return pa > pb;
              if (a.length != b.length) return a.length > b.length;
              if (a.start != b.start) return a.start < b.start;
              return a.pattern < b.pattern;
            });

  std::vector<bool> taken(tokens.size(), false);
  std::vector<Candidate> chosen;
  for (const Candidate &c : candidates) {
    bool free = true;
    for (std::size_t k = c.start; k < c.start + c.length && free; ++k) free = !taken[k];
    if (!free) continue;
    for (std::size_t k = c.start; k < c.start + c.length; ++k) taken[k] = true;
    chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate &a, const Candidate &b) { return a.start < b.start; });

  std::vector<AlignmentSpan> spans;
  for (const Candidate &c : chosen) {
    const Pattern &p = patterns[c.pattern];
    AlignmentSpan span;
    span.attribute = p.attribute;
    span.value = p.value;
    span.begin = tokens[c.start].begin;
    span.end = tokens[c.start + c.length - 1].end;
    span.pattern = p.text;
    span.in_domain = p.in_domain;
    if (p.negatable) {
      int window = lexicon.negation_window();
      for (std::size_t k = c.start; k > 0 && window > 0; --window) {
        const std::string &prev = tokens[--k].text;
        if (IsSentenceBoundary(prev)) break;
        if (lexicon.IsNegationCue(prev)) {
          span.negated = true;
          break;
        }
      }
      if (span.negated) {
        const LexiconAttribute *la = lexicon.Find(p.attribute);
        auto it = la->negate.find(NormalizeValue(p.value));
        if (it != la->negate.end()) span.value = it->second;
      }
    }
    spans.push_back(std::move(span));
  }
  return spans;
}

RetrofitResult ExtractMr(std::string_view utterance, const Lexicon &lexicon) {
  RetrofitResult result;
  result.spans = Align(utterance, lexicon);
  std::vector<std::string> order;
  std::map<std::string, int> counts;
  for (const AlignmentSpan &span : result.spans) {
    if (!span.in_domain) result.invalid_value_flag = true;
    std::string key = NormalizeValue(span.attribute);
    if (counts[key]++ > 0) {
      result.repetition_flag = true;
      continue;
    }
    if (span.attribute == kRecommendId) {
      result.retrofit_mr.recommend = true;
    } else {
      result.retrofit_mr.slots.push_back({span.attribute, span.value});
    }
  }
  SortCanonical(&result.retrofit_mr, lexicon.ontology());
  result.retrofit_mr.provenance = InferProvenance(result.retrofit_mr, lexicon.ontology());
  return result;
}

bool SameValue(const Ontology &ontology, std::string_view attribute,
               std::string_view a, std::string_view b) {
  const Attribute *attr = ontology.Find(attribute);
  std::string ca(a), cb(b);
  if (attr != nullptr) {
    if (auto c = attr->CanonicalValue(a)) ca = *c;
    if (auto c = attr->CanonicalValue(b)) cb = *c;
  }
  return NormalizeValue(ca) == NormalizeValue(cb);
}

ErrorCounts ClassifyErrors(const MeaningRepresentation &input,
                           const RetrofitResult &result, const Ontology &ontology) {
  ErrorCounts counts;
  counts.slots = input.slot_count();
  auto groups = GroupSpans(result.spans);

  auto score_input = [&](const std::string &attribute, const std::string &value) {
    auto it = groups.find(NormalizeValue(attribute));
    if (it == groups.end()) {
      ++counts.deletions;
      return;
    }
    if (attribute != kRecommendId &&
        !SameValue(ontology, attribute, it->second.front()->value, value)) {
      ++counts.substitutions;
    }
  };
  if (input.recommend) score_input(std::string(kRecommendId), "yes");
  for (const Slot &slot : input.slots) score_input(slot.attribute, slot.value);

  for (const auto &[key, spans] : groups) {
    counts.repetitions += static_cast<int>(spans.size()) - 1;
    bool in_input = key == kRecommendId ? input.recommend : input.Has(key);
    if (!in_input) ++counts.hallucinations;
  }
  return counts;
}

}  // namespace mrforge
