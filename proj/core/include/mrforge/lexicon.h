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

#ifndef MRFORGE_LEXICON_H_
#define MRFORGE_LEXICON_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mrforge/ontology.h"

namespace mrforge {

// One surface pattern, compiled to normalized tokens.
struct Pattern {
  std::string attribute;  // combined-ontology id, or "recommend"
  std::string value;      // canonical value when in domain, as listed otherwise
  bool in_domain = true;
  bool negatable = false;
  int precedence = 0;
  std::string text;  // normalized pattern text
  std::vector<std::string> tokens;
};

struct LexiconValue {
  std::string value;
  bool in_domain = true;
  std::vector<std::string> words;  // surface words; words[0] feeds templates
};

struct LexiconAttribute {
  std::string id;
  bool subject = false;  // realized as the sentence subject, not a clause
  int precedence = 0;
  std::vector<std::string> frames;
  std::string clause_template;
  std::map<std::string, std::string> value_templates;  // canonical value -> predicate
  std::string aggregate;  // empty if the attribute never aggregates
  std::map<std::string, std::string> negate;
  std::vector<LexiconValue> values;

  const LexiconValue *FindValue(std::string_view value) const;
};

// Surface lexicon bound to an ontology. Immutable after construction.
class Lexicon {
 public:
  // Parses the YAML lexicon and binds every attribute and value to the
  // ontology. Throws ConfigError on unknown attributes, empty patterns and
  // template gaps (an attribute value that cannot be realized).
  static Lexicon Parse(std::string_view yaml, const Ontology &ontology);

  const Ontology &ontology() const { return *ontology_; }
  int version() const { return version_; }

  const std::vector<Pattern> &patterns() const { return patterns_; }
  // Indices into patterns() of every pattern starting with `token`.
  const std::vector<int> *PatternsStartingWith(std::string_view token) const;

  int negation_window() const { return negation_window_; }
  bool IsNegationCue(std::string_view token) const;

  const LexiconAttribute *Find(std::string_view attribute) const;

  // Clause predicate for a slot, e.g. "has good food". Throws ConfigError
  // for a template gap.
  std::string Predicate(std::string_view attribute, std::string_view value) const;
  // Phrase used when the slot is joined onto an aggregate clause, e.g.
  // "fantastic decor"; nullopt if the attribute does not aggregate.
  std::optional<std::string> AggregatePhrase(std::string_view attribute,
                                             std::string_view value) const;
  const std::string &recommend_predicate() const { return recommend_template_; }

  // Every closed-domain value lacking a pattern or a realization, as
  // "attribute[value]: reason" strings. Empty for a complete lexicon.
  std::vector<std::string> CoverageGaps() const;

 private:
  const Ontology *ontology_ = nullptr;
  int version_ = 1;
  int negation_window_ = 3;
  std::vector<std::string> negation_cues_;
  std::string recommend_template_;
  std::vector<LexiconAttribute> attributes_;
  std::vector<Pattern> patterns_;
  std::unordered_map<std::string, std::vector<int>> index_;
};

// The bundled lexicon bound to DefaultOntology(); built once.
const Lexicon &DefaultLexicon();

}  // namespace mrforge

#endif  // MRFORGE_LEXICON_H_
