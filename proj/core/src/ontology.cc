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

#include "mrforge/ontology.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mrforge/error.h"
#include "mrforge/text.h"

namespace mrforge {
namespace {

int SourceOrder(Source source) {
  switch (source) {
    case Source::kShared: return 0;
    case Source::kNyc: return 1;
    case Source::kE2e: return 2;
  }
  return 3;
}

std::string Scalar(const YAML::Node &node, const std::string &what) {
  if (!node || !node.IsScalar()) throw ConfigError("expected scalar for " + what);
  return node.as<std::string>();
}

Attribute ParseAttributeNode(const YAML::Node &node, bool want_source) {
  if (!node.IsMap()) throw ConfigError("attribute entry must be a map");
  Attribute attr;
  attr.id = CollapseWhitespace(Scalar(node["id"], "attribute id"));
  if (want_source) {
    attr.source = ParseSource(Scalar(node["source"], "source of " + attr.id));
  }
  std::string domain = node["domain"] ? Scalar(node["domain"], "domain") : "closed";
  if (domain == "open") {
    attr.open = true;
  } else if (domain != "closed") {
    throw ConfigError("attribute '" + attr.id + "': unknown domain '" + domain + "'");
  }
  if (const YAML::Node &values = node["values"]) {
    if (!values.IsSequence()) {
      throw ConfigError("attribute '" + attr.id + "': values must be a list");
    }
    for (const auto &v : values) attr.values.push_back(CollapseWhitespace(v.as<std::string>()));
  }
  if (const YAML::Node &aliases = node["aliases"]) {
    for (const auto &kv : aliases) {
      attr.aliases[NormalizeValue(kv.first.as<std::string>())] =
          CollapseWhitespace(kv.second.as<std::string>());
    }
  }
  if (node["delex"]) attr.delex_class = Scalar(node["delex"], "delex");
  if (!attr.open && attr.values.empty()) {
    throw ConfigError("attribute '" + attr.id + "' has an empty closed domain");
  }
  for (const auto &[alias, target] : attr.aliases) {
    bool known = std::any_of(attr.values.begin(), attr.values.end(),
                             [&](const std::string &v) { return v == target; });
    if (!known) {
      throw ConfigError("attribute '" + attr.id + "': alias '" + alias +
                        "' targets unknown value '" + target + "'");
    }
  }
  return attr;
}

bool ParseActs(const YAML::Node &node) {
  bool recommend = false;
  if (!node) return false;
  for (const auto &act : node) {
    std::string name = AsciiLower(act.as<std::string>());
    if (name == "recommend") {
      recommend = true;
    } else if (name != "inform") {
      throw ConfigError("unknown dialogue act '" + name + "'");
    }
  }
  return recommend;
}

YAML::Node LoadYaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception &e) {
    throw ConfigError(std::string("invalid YAML: ") + e.what());
  }
}

}  // namespace

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kNyc: return "nyc";
    case Source::kE2e: return "e2e";
    case Source::kShared: return "shared";
  }
  return "?";
}

Source ParseSource(std::string_view name) {
  std::string lower = AsciiLower(CollapseWhitespace(name));
  if (lower == "nyc") return Source::kNyc;
  if (lower == "e2e") return Source::kE2e;
  if (lower == "shared") return Source::kShared;
  throw ConfigError("unknown source '" + std::string(name) + "'");
}

std::optional<std::string> Attribute::CanonicalValue(std::string_view value) const {
  std::string collapsed = CollapseWhitespace(value);
  if (collapsed.empty()) return std::nullopt;
  std::string norm = AsciiLower(collapsed);
  if (has_placeholder() &&
      (norm == AsciiLower(placeholder()) || norm == AsciiLower(delex_class))) {
    return placeholder();
  }
  if (open) return collapsed;
  for (const std::string &v : values) {
    if (NormalizeValue(v) == norm) return v;
  }
  if (auto it = aliases.find(norm); it != aliases.end()) return it->second;
  return std::nullopt;
}

Ontology::Ontology(std::string name, int version, std::vector<Attribute> attributes,
                   bool has_recommend)
    : name_(std::move(name)),
      version_(version),
      has_recommend_(has_recommend),
      attributes_(std::move(attributes)) {
  for (const Attribute &attr : attributes_) {
    std::string key = NormalizeValue(attr.id);
    if (key.empty()) throw ConfigError("empty attribute id");
    if (key == kRecommendId) {
      throw ConfigError("'recommend' is a dialogue act, not an attribute");
    }
    if (attr.id.find_first_of("[],()") != std::string::npos) {
      throw ConfigError("attribute id '" + attr.id + "' contains reserved characters");
    }
    if (!attr.open && attr.values.empty()) {
      throw ConfigError("attribute '" + attr.id + "' has an empty closed domain");
    }
    if (!rank_.emplace(key, 0).second) {
      throw ConfigError("duplicate attribute id '" + attr.id + "'");
    }
  }
  std::stable_sort(attributes_.begin(), attributes_.end(),
                   [](const Attribute &x, const Attribute &y) {
                     int sx = SourceOrder(x.source), sy = SourceOrder(y.source);
                     if (sx != sy) return sx < sy;
                     return AsciiLower(x.id) < AsciiLower(y.id);
                   });
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    rank_[NormalizeValue(attributes_[i].id)] = static_cast<int>(i);
  }
}

const Attribute *Ontology::Find(std::string_view id) const {
  auto it = rank_.find(NormalizeValue(id));
  if (it == rank_.end()) return nullptr;
  return &attributes_[it->second];
}

int Ontology::Rank(std::string_view id) const {
  std::string key = NormalizeValue(id);
  if (key == kRecommendId) return -2;
  auto it = rank_.find(key);
  return it == rank_.end() ? -1 : it->second;
}

std::vector<std::string> Ontology::Ids(Source source) const {
  std::vector<std::string> ids;
  for (const Attribute &attr : attributes_) {
    if (attr.source == source) ids.push_back(attr.id);
  }
  return ids;
}

bool Ontology::IsUnique(std::string_view id, Source source) const {
  const Attribute *attr = Find(id);
  return attr != nullptr && attr->source == source && source != Source::kShared;
}

void AttributeMap::Add(Source source, std::string_view from, std::string_view to) {
  entries_[{source, NormalizeValue(from)}] = CollapseWhitespace(to);
}

std::string AttributeMap::Map(Source source, std::string_view id) const {
  auto it = entries_.find({source, NormalizeValue(id)});
  if (it == entries_.end()) return CollapseWhitespace(id);
  return it->second;
}

AttributeMap AttributeMap::Parse(std::string_view text) {
  AttributeMap map;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  for (const std::string &raw : Split(text, '\n')) {
    ++line_no;
    std::size_t line_offset = offset;
    offset += raw.size() + 1;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (CollapseWhitespace(line).empty() || line[0] == '#') continue;
    std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("attribute map line " + std::to_string(line_no) +
                           ": expected 3 tab-separated fields",
                       line_offset, line_no);
    }
    Source source;
    try {
      source = ParseSource(fields[0]);
    } catch (const ConfigError &e) {
      throw ParseError("attribute map line " + std::to_string(line_no) + ": " + e.what(),
                       line_offset, line_no);
    }
    map.Add(source, fields[1], fields[2]);
  }
  return map;
}

Ontology MergeOntologies(const SourceOntology &a, const SourceOntology &b,
                         const AttributeMap &attribute_map) {
  struct Entry {
    Attribute attr;
    bool from_a = false;
    bool from_b = false;
  };
  std::vector<Entry> entries;
  auto find_entry = [&](const std::string &id) -> Entry * {
    for (Entry &e : entries) {
      if (NormalizeValue(e.attr.id) == NormalizeValue(id)) return &e;
    }
    return nullptr;
  };

  for (const SourceOntology *side : {&a, &b}) {
    if (side->source == Source::kShared) {
      throw ConfigError("source ontology '" + side->name + "' must be tagged nyc or e2e");
    }
    if (side->has_recommend && side->source != Source::kNyc) {
      throw ConfigError("RECOMMEND must come from the NYC ontology, found in '" +
                        side->name + "'");
    }
  }

  auto absorb = [&](const SourceOntology &side, bool is_a) {
    for (const Attribute &source_attr : side.attributes) {
      std::string id = attribute_map.Map(side.source, source_attr.id);
      Entry *entry = find_entry(id);
      if (entry == nullptr) {
        Entry &fresh = entries.emplace_back();
        fresh.attr = source_attr;
        fresh.attr.id = id;
        (is_a ? fresh.from_a : fresh.from_b) = true;
        continue;
      }
      bool &mine = is_a ? entry->from_a : entry->from_b;
      if (mine) {
        throw ConfigError("two attributes of '" + side.name + "' map to '" + id + "'");
      }
      mine = true;
      Attribute &merged = entry->attr;
      if (merged.open != source_attr.open) {
        throw MergeConflictError(id, "open on one side, closed on the other");
      }
      if (merged.has_placeholder() && source_attr.has_placeholder() &&
          merged.delex_class != source_attr.delex_class) {
        throw MergeConflictError(id, "placeholder classes " + merged.placeholder() +
                                         " and " + source_attr.placeholder());
      }
      if (!merged.has_placeholder()) merged.delex_class = source_attr.delex_class;
      if (!merged.open) {
        for (const std::string &v : source_attr.values) {
          if (!merged.CanonicalValue(v)) merged.values.push_back(v);
        }
      }
      for (const auto &[alias, target] : source_attr.aliases) {
        auto it = merged.aliases.find(alias);
        if (it != merged.aliases.end() && it->second != target) {
          throw MergeConflictError(id, "alias '" + alias + "' maps to both '" +
                                           it->second + "' and '" + target + "'");
        }
        merged.aliases[alias] = target;
      }
    }
  };
  absorb(a, true);
  absorb(b, false);

  std::vector<Attribute> attributes;
  for (Entry &e : entries) {
    e.attr.source = e.from_a && e.from_b ? Source::kShared
                    : e.from_a           ? a.source
                                         : b.source;
    attributes.push_back(std::move(e.attr));
  }
  return Ontology(a.name + "+" + b.name, 1, std::move(attributes),
                  a.has_recommend || b.has_recommend);
}

SourceOntology ParseSourceOntology(std::string_view yaml) {
  YAML::Node root = LoadYaml(yaml);
  if (!root["source"]) throw ConfigError("source descriptor lacks a 'source' key");
  SourceOntology out;
  try {
    out.name = root["ontology"] ? root["ontology"].as<std::string>() : "unnamed";
    out.source = ParseSource(root["source"].as<std::string>());
    out.version = root["version"] ? root["version"].as<int>() : 1;
    out.has_recommend = ParseActs(root["dialogue_acts"]);
    for (const auto &node : root["attributes"]) {
      out.attributes.push_back(ParseAttributeNode(node, false));
    }
  } catch (const YAML::Exception &e) {
    throw ConfigError(std::string("source descriptor: ") + e.what());
  }
  return out;
}

Ontology ParseOntology(std::string_view yaml) {
  YAML::Node root = LoadYaml(yaml);
  if (root["source"]) {
    throw ConfigError("this is a source descriptor; merge it before use");
  }
  try {
    std::vector<Attribute> attributes;
    for (const auto &node : root["attributes"]) {
      attributes.push_back(ParseAttributeNode(node, true));
    }
    return Ontology(root["ontology"] ? root["ontology"].as<std::string>() : "unnamed",
                    root["version"] ? root["version"].as<int>() : 1,
                    std::move(attributes), ParseActs(root["dialogue_acts"]));
  } catch (const YAML::Exception &e) {
    throw ConfigError(std::string("ontology: ") + e.what());
  }
}

std::string DumpOntology(const Ontology &ontology) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "ontology" << YAML::Value << ontology.name();
  out << YAML::Key << "version" << YAML::Value << ontology.version();
  out << YAML::Key << "dialogue_acts" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << "inform";
  if (ontology.has_recommend()) out << "recommend";
  out << YAML::EndSeq;
  out << YAML::Key << "attributes" << YAML::Value << YAML::BeginSeq;
  for (const Attribute &attr : ontology.attributes()) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << attr.id;
    out << YAML::Key << "source" << YAML::Value << std::string(SourceName(attr.source));
    if (attr.open) out << YAML::Key << "domain" << YAML::Value << "open";
    if (!attr.values.empty()) {
      out << YAML::Key << "values" << YAML::Value << YAML::Flow << attr.values;
    }
    if (!attr.aliases.empty()) {
      out << YAML::Key << "aliases" << YAML::Value << YAML::Flow << YAML::BeginMap;
      for (const auto &[alias, target] : attr.aliases) {
        out << YAML::Key << alias << YAML::Value << target;
      }
      out << YAML::EndMap;
    }
    if (attr.has_placeholder()) {
      out << YAML::Key << "delex" << YAML::Value << attr.delex_class;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

const Ontology &DefaultOntology() {
  static const Ontology ontology = MergeOntologies(ParseSourceOntology(DefaultNycDescriptor()),
                                                   ParseSourceOntology(DefaultE2eDescriptor()),
                                                   AttributeMap::Parse(DefaultAttributeMap()));
  return ontology;
}

std::string ReadFileOrThrow(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace mrforge
