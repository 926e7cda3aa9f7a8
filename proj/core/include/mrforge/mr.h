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

#ifndef MRFORGE_MR_H_
#define MRFORGE_MR_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrforge/ontology.h"

namespace mrforge {

// Which sources an MR draws on; drives the supervision booleans.
enum class Provenance { kNyc, kE2e, kBoth };

std::string_view ProvenanceName(Provenance provenance);

struct Slot {
  std::string attribute;
  std::string value;

  bool operator==(const Slot &) const = default;
};

// A flat dialogue-act MR: INFORM slots plus an optional RECOMMEND act.
// Repeated attributes are representable so that validation can report them.
struct MeaningRepresentation {
  std::vector<Slot> slots;
  bool recommend = false;
  Provenance provenance = Provenance::kBoth;

  const Slot *Find(std::string_view attribute) const;
  bool Has(std::string_view attribute) const { return Find(attribute) != nullptr; }

  // Attribute slots only; this is the "length" of an MR.
  int length() const { return static_cast<int>(slots.size()); }
  // N for error rates: attribute slots plus the RECOMMEND pseudo-slot.
  int slot_count() const { return length() + (recommend ? 1 : 0); }

  bool operator==(const MeaningRepresentation &) const = default;
};

struct Violation {
  enum class Kind { kRepeatedAttribute, kValueOutOfDomain, kUnknownAttribute };
  Kind kind;
  std::string attribute;
  std::string value;

  std::string ToString() const;
};

struct ValidityReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string ToString() const;
};

ValidityReport ValidateMr(const MeaningRepresentation &mr, const Ontology &ontology);

// Sorts slots into canonical order and spells attribute ids and values the
// way the ontology does. Throws DataError if the MR is invalid.
MeaningRepresentation Canonicalize(const MeaningRepresentation &mr,
                                   const Ontology &ontology);

// Canonical ordering without validation; unknown attributes go last in
// their original order. Used for retrofit MRs that may carry bad values.
void SortCanonical(MeaningRepresentation *mr, const Ontology &ontology);

// Provenance implied by the attributes: BOTH if NYC-unique (or RECOMMEND)
// and E2E-unique attributes are present or neither is, else the one source.
Provenance InferProvenance(const MeaningRepresentation &mr, const Ontology &ontology);

// "recommend[yes], cuisine[italian], name[[RESTAURANT]]".
std::string FormatMr(const MeaningRepresentation &mr);

// Grammar-level slot as written, before any ontology lookup.
struct RawSlot {
  std::string attribute;
  std::string value;
  std::size_t position = 0;  // byte offset of the attribute id
};

// Splits `attr[value], ...` text. An `inform( ... )` wrapper is accepted
// and flattened; `recommend( ... )` also yields a recommend[yes] slot. Values may contain nested brackets. Throws ParseError.
std::vector<RawSlot> ParseSlots(std::string_view text);

// Parses the canonical MR grammar against an ontology. Attribute ids are
// case-insensitive; values are respelled canonically when in domain and
// kept (whitespace-collapsed) otherwise. Provenance is inferred. Throws
// ParseError on empty input, bad bracketing, unknown or repeated attributes.
MeaningRepresentation ParseMr(std::string_view text, const Ontology &ontology);

enum class SupervisionMode { kNosup, kAttr, kBool, kGuideHint };

std::string_view SupervisionName(SupervisionMode mode);
// "nosup", "attr", "bool", "guide". Throws ConfigError.
SupervisionMode ParseSupervision(std::string_view name);

// (e2e, nyc): E2E is (true, false), NYC (false, true), combined (true, true).
struct SourceBooleans {
  bool e2e = true;
  bool nyc = true;

  bool operator==(const SourceBooleans &) const = default;
};

SourceBooleans SourceBooleansFor(Provenance provenance);
// "True||False" style.
std::string FormatSourceBooleans(SourceBooleans booleans);

struct MrToken {
  std::string attribute;
  std::string value;

  bool operator==(const MrToken &) const = default;
};

struct SerializedMr {
  std::vector<MrToken> tokens;
  // Only set in GUIDE_HINT mode; carried out of band to the generator.
  std::optional<SourceBooleans> guide_hint;

  // Space-joined "attribute value" tokens.
  std::string ToString() const;
};

// Encoder input for one MR. RECOMMEND is expanded to a leading
// ("recommend", "yes") pair. ATTR appends "_<booleans>" to every attribute
// token; BOOL appends a trailing ("source", <booleans>) pseudo-slot.
SerializedMr SerializeMr(const MeaningRepresentation &mr, SupervisionMode mode);

}  // namespace mrforge

#endif  // MRFORGE_MR_H_
