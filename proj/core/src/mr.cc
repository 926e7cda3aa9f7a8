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

#include "mrforge/mr.h"

#include <algorithm>
#include <climits>
#include <set>

#include "mrforge/error.h"
#include "mrforge/text.h"

namespace mrforge {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::size_t SkipSpace(std::string_view text, std::size_t i) {
  while (i < text.size() && IsSpace(text[i])) ++i;
  return i;
}

bool IsYes(std::string_view value) {
  std::string v = NormalizeValue(value);
  return v == "yes" || v == "true";
}

bool IsNo(std::string_view value) {
  std::string v = NormalizeValue(value);
  return v == "no" || v == "false";
}

}  // namespace

std::string_view ProvenanceName(Provenance provenance) {
  switch (provenance) {
    case Provenance::kNyc: return "NYC";
    case Provenance::kE2e: return "E2E";
    case Provenance::kBoth: return "BOTH";
  }
  return "?";
}

const Slot *MeaningRepresentation::Find(std::string_view attribute) const {
  for (const Slot &slot : slots) {
    if (EqualsIgnoreCase(slot.attribute, attribute)) return &slot;
  }
  return nullptr;
}

std::string Violation::ToString() const {
  switch (kind) {
    case Kind::kRepeatedAttribute:
      return "repeated attribute " + attribute;
    case Kind::kValueOutOfDomain:
      return "value '" + value + "' out of domain for " + attribute;
    case Kind::kUnknownAttribute:
      return "unknown attribute " + attribute;
  }
  return "";
}

std::string ValidityReport::ToString() const {
  if (ok()) return "ok";
  std::string out;
  for (const Violation &v : violations) {
    if (!out.empty()) out += "; ";
    out += v.ToString();
  }
  return out;
}

ValidityReport ValidateMr(const MeaningRepresentation &mr, const Ontology &ontology) {
  ValidityReport report;
  std::set<std::string> seen;
  for (const Slot &slot : mr.slots) {
    std::string key = NormalizeValue(slot.attribute);
    const Attribute *attr = ontology.Find(slot.attribute);
    if (attr == nullptr) {
      report.violations.push_back(
          {Violation::Kind::kUnknownAttribute, slot.attribute, slot.value});
      continue;
    }
    if (!seen.insert(key).second) {
      report.violations.push_back(
          {Violation::Kind::kRepeatedAttribute, attr->id, slot.value});
    }
    if (!attr->Accepts(slot.value)) {
      report.violations.push_back(
          {Violation::Kind::kValueOutOfDomain, attr->id, slot.value});
    }
  }
  return report;
}

void SortCanonical(MeaningRepresentation *mr, const Ontology &ontology) {
  std::stable_sort(mr->slots.begin(), mr->slots.end(),
                   [&](const Slot &a, const Slot &b) {
                     int ra = ontology.Rank(a.attribute);
                     int rb = ontology.Rank(b.attribute);
                     if (ra < 0) ra = INT_MAX;
                     if (rb < 0) rb = INT_MAX;
                     return ra < rb;
                   });
}

MeaningRepresentation Canonicalize(const MeaningRepresentation &mr,
                                   const Ontology &ontology) {
  ValidityReport report = ValidateMr(mr, ontology);
  if (!report.ok()) throw DataError("invalid MR: " + report.ToString());
  MeaningRepresentation out = mr;
  for (Slot &slot : out.slots) {
    const Attribute *attr = ontology.Find(slot.attribute);
    slot.attribute = attr->id;
    slot.value = *attr->CanonicalValue(slot.value);
  }
  SortCanonical(&out, ontology);
  return out;
}

Provenance InferProvenance(const MeaningRepresentation &mr, const Ontology &ontology) {
  bool nyc = mr.recommend;
  bool e2e = false;
  for (const Slot &slot : mr.slots) {
    const Attribute *attr = ontology.Find(slot.attribute);
    if (attr == nullptr) continue;
    if (attr->source == Source::kNyc) nyc = true;
    if (attr->source == Source::kE2e) e2e = true;
  }
  if (nyc && !e2e) return Provenance::kNyc;
  if (e2e && !nyc) return Provenance::kE2e;
  return Provenance::kBoth;
}

std::string FormatMr(const MeaningRepresentation &mr) {
  std::string out;
  if (mr.recommend) out = "recommend[yes]";
  for (const Slot &slot : mr.slots) {
    if (!out.empty()) out += ", ";
    out += slot.attribute;
    out += '[';
    out += slot.value;
    out += ']';
  }
  return out;
}

std::vector<RawSlot> ParseSlots(std::string_view text) {
  std::vector<RawSlot> slots;
  std::size_t i = SkipSpace(text, 0);
  if (i == text.size()) throw ParseError("empty MR", 0);

  // Optional inform( ... ) or recommend( ... ) wrapper, possibly after a
  // leading recommend slot.
  int wrapper_depth = 0;
  bool expect_slot = true;
  while (true) {
    i = SkipSpace(text, i);
    if (i >= text.size()) {
      if (expect_slot && !slots.empty()) {
        throw ParseError("trailing comma", text.size());
      }
      break;
    }
    if (!expect_slot) {
      if (text[i] == ')' && wrapper_depth > 0) {
        --wrapper_depth;
        ++i;
        continue;
      }
      if (text[i] != ',') {
        throw ParseError(std::string("expected ',' but found '") + text[i] + "'", i);
      }
      ++i;
      expect_slot = true;
      continue;
    }

    std::size_t start = i;
    while (i < text.size() && text[i] != '[' && text[i] != '(' && text[i] != ',' &&
           text[i] != ']' && text[i] != ')') {
      ++i;
    }
    std::string id = CollapseWhitespace(text.substr(start, i - start));
    if (i < text.size() && text[i] == '(') {
      bool recommend = EqualsIgnoreCase(id, kRecommendId);
      if (!recommend && !EqualsIgnoreCase(id, "inform")) {
        throw ParseError("unknown dialogue act '" + id + "'", start);
      }
      if (wrapper_depth > 0) throw ParseError("nested dialogue act '" + id + "'", start);
      if (recommend) slots.push_back({std::string(kRecommendId), "yes", start});
      ++wrapper_depth;
      ++i;
      continue;
    }
    if (i >= text.size() || text[i] != '[') {
      if (id.empty()) throw ParseError("expected attribute", start);
      throw ParseError("missing '[' after attribute '" + id + "'", i);
    }
    if (id.empty()) throw ParseError("empty attribute id", start);

    std::size_t open = i;
    int depth = 0;
    std::size_t value_begin = i + 1;
    for (; i < text.size(); ++i) {
      if (text[i] == '[') {
        ++depth;
      } else if (text[i] == ']') {
        if (--depth == 0) break;
      }
    }
    if (i >= text.size()) throw ParseError("unbalanced '[' for " + id, open);
    slots.push_back({id, std::string(text.substr(value_begin, i - value_begin)), start});
    ++i;
    expect_slot = false;
  }
  if (wrapper_depth != 0) throw ParseError("unclosed dialogue act", text.size());
  if (slots.empty()) throw ParseError("empty MR", 0);
  return slots;
}

MeaningRepresentation ParseMr(std::string_view text, const Ontology &ontology) {
  MeaningRepresentation mr;
  std::set<std::string> seen;
  bool recommend_seen = false;
  for (const RawSlot &raw : ParseSlots(text)) {
    if (EqualsIgnoreCase(raw.attribute, kRecommendId)) {
      if (recommend_seen) throw ParseError("duplicate attribute recommend", raw.position);
      recommend_seen = true;
      if (IsYes(raw.value)) {
        mr.recommend = true;
      } else if (!IsNo(raw.value)) {
        throw ParseError("recommend takes yes or no, got '" + raw.value + "'",
                         raw.position);
      }
      continue;
    }
    const Attribute *attr = ontology.Find(raw.attribute);
    if (attr == nullptr) {
      throw ParseError("unknown attribute '" + raw.attribute + "'", raw.position);
    }
    if (!seen.insert(NormalizeValue(attr->id)).second) {
      throw ParseError("duplicate attribute " + attr->id, raw.position);
    }
    std::string value = CollapseWhitespace(raw.value);
    if (value.empty()) {
      throw ParseError("empty value for " + attr->id, raw.position);
    }
    if (auto canonical = attr->CanonicalValue(value)) value = *canonical;
    mr.slots.push_back({attr->id, value});
  }
  mr.provenance = InferProvenance(mr, ontology);
  return mr;
}

std::string_view SupervisionName(SupervisionMode mode) {
  switch (mode) {
    case SupervisionMode::kNosup: return "nosup";
    case SupervisionMode::kAttr: return "attr";
    case SupervisionMode::kBool: return "bool";
    case SupervisionMode::kGuideHint: return "guide";
  }
  return "?";
}

SupervisionMode ParseSupervision(std::string_view name) {
  std::string n = NormalizeValue(name);
  if (n == "nosup") return SupervisionMode::kNosup;
  if (n == "attr") return SupervisionMode::kAttr;
  if (n == "bool") return SupervisionMode::kBool;
  if (n == "guide" || n == "guide_hint" || n == "guide-hint") {
    return SupervisionMode::kGuideHint;
  }
  throw ConfigError("unknown supervision mode '" + std::string(name) + "'");
}

SourceBooleans SourceBooleansFor(Provenance provenance) {
  switch (provenance) {
    case Provenance::kE2e: return {true, false};
    case Provenance::kNyc: return {false, true};
    case Provenance::kBoth: return {true, true};
  }
  return {};
}

std::string FormatSourceBooleans(SourceBooleans booleans) {
  return std::string(booleans.e2e ? "True" : "False") + "||" +
         (booleans.nyc ? "True" : "False");
}

std::string SerializedMr::ToString() const {
  std::string out;
  for (const MrToken &token : tokens) {
    if (!out.empty()) out += ' ';
    out += token.attribute;
    out += ' ';
    out += token.value;
  }
  return out;
}

SerializedMr SerializeMr(const MeaningRepresentation &mr, SupervisionMode mode) {
  SerializedMr out;
  SourceBooleans booleans = SourceBooleansFor(mr.provenance);
  std::string suffix;
  if (mode == SupervisionMode::kAttr) suffix = "_" + FormatSourceBooleans(booleans);
  if (mr.recommend) out.tokens.push_back({std::string(kRecommendId) + suffix, "yes"});
  for (const Slot &slot : mr.slots) {
    out.tokens.push_back({slot.attribute + suffix, slot.value});
  }
  if (mode == SupervisionMode::kBool) {
    out.tokens.push_back({"source", FormatSourceBooleans(booleans)});
  }
  if (mode == SupervisionMode::kGuideHint) out.guide_hint = booleans;
  return out;
}

}  // namespace mrforge
