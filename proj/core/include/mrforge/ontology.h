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

#ifndef MRFORGE_ONTOLOGY_H_
#define MRFORGE_ONTOLOGY_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrforge {

// Which source ontology an attribute of the combined ontology comes from.
enum class Source { kNyc, kE2e, kShared };

std::string_view SourceName(Source source);
// Accepts "nyc", "e2e", "shared" (case-insensitive). Throws ConfigError.
Source ParseSource(std::string_view name);

// Reserved id of the RECOMMEND dialogue act when it is treated as a slot.
inline constexpr std::string_view kRecommendId = "recommend";

struct Attribute {
  std::string id;
  Source source = Source::kShared;
  // Open attributes accept any non-empty value (names, points of interest);
  // closed ones accept `values`, their aliases and the delex placeholder.
  bool open = false;
  std::vector<std::string> values;
  // Normalized alias -> canonical value.
  std::map<std::string, std::string> aliases;
  // Placeholder class without brackets, e.g. "RESTAURANT"; empty if none.
  std::string delex_class;

  bool has_placeholder() const { return !delex_class.empty(); }
  // "[RESTAURANT]".
  std::string placeholder() const { return "[" + delex_class + "]"; }

  // Canonical spelling of `value` if the attribute accepts it. Matching is
  // case-insensitive after whitespace collapsing; the bare class name
  // ("restaurant") is read as the placeholder.
  std::optional<std::string> CanonicalValue(std::string_view value) const;
  bool Accepts(std::string_view value) const {
    return CanonicalValue(value).has_value();
  }
};

// An ontology as shipped with one source dataset, before merging.
struct SourceOntology {
  std::string name;
  Source source = Source::kNyc;
  int version = 1;
  bool has_recommend = false;
  std::vector<Attribute> attributes;  // Attribute::source is ignored
};

// The combined ontology. Attributes are kept in canonical order: SHARED,
// then NYC-unique, then E2E-unique, each alphabetical (case-insensitive).
// RECOMMEND, when present, precedes all attributes.
class Ontology {
 public:
  Ontology() = default;
  // Throws ConfigError on duplicate or reserved ids and empty closed domains.
  Ontology(std::string name, int version, std::vector<Attribute> attributes,
           bool has_recommend);

  const std::string &name() const { return name_; }
  int version() const { return version_; }
  bool has_recommend() const { return has_recommend_; }
  const std::vector<Attribute> &attributes() const { return attributes_; }
  std::size_t size() const { return attributes_.size(); }

  // Case-insensitive lookup; nullptr if unknown.
  const Attribute *Find(std::string_view id) const;
  // Position in canonical order, or -1 for unknown ids. RECOMMEND ranks -2 so
  // that it sorts first.
  int Rank(std::string_view id) const;
  std::vector<std::string> Ids(Source source) const;
  bool IsUnique(std::string_view id, Source source) const;

 private:
  std::string name_;
  int version_ = 1;
  bool has_recommend_ = false;
  std::vector<Attribute> attributes_;
  std::map<std::string, int> rank_;  // normalized id -> rank
};

// Per-source rename table. Ids that are not listed map to themselves.
class AttributeMap {
 public:
  void Add(Source source, std::string_view from, std::string_view to);
  std::string Map(Source source, std::string_view id) const;
  bool empty() const { return entries_.empty(); }

  // Tab-separated lines: source, source attribute, combined attribute.
  // '#' starts a comment line. Throws ParseError.
  static AttributeMap Parse(std::string_view text);

 private:
  std::map<std::pair<Source, std::string>, std::string> entries_;
};

// Merges two source ontologies. Attributes reached from both sides (after
// renaming) become SHARED and their closed domains are unioned; the rest keep
// their side's source tag. Throws MergeConflictError when a shared attribute
// is open on one side and closed on the other, or carries two different
// placeholder classes; ConfigError if RECOMMEND comes from a non-NYC side.
Ontology MergeOntologies(const SourceOntology &a, const SourceOntology &b,
                         const AttributeMap &attribute_map);

// YAML readers. A source descriptor has a top-level `source:` key; a
// combined ontology tags every attribute with its own `source:`.
SourceOntology ParseSourceOntology(std::string_view yaml);
Ontology ParseOntology(std::string_view yaml);
std::string DumpOntology(const Ontology &ontology);

// Built-in NYC/E2E descriptors, rename table and lexicon text.
std::string_view DefaultNycDescriptor();
std::string_view DefaultE2eDescriptor();
std::string_view DefaultAttributeMap();
std::string_view DefaultLexiconText();

// Merge of the built-in descriptors; built once.
const Ontology &DefaultOntology();

std::string ReadFileOrThrow(const std::string &path);

}  // namespace mrforge

#endif  // MRFORGE_ONTOLOGY_H_
