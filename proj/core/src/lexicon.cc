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

#include "mrforge/lexicon.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>

#include "mrforge/error.h"
#include "mrforge/text.h"

namespace mrforge {
namespace {

std::string Substitute(std::string_view pattern, std::string_view key,
                       std::string_view replacement) {
  std::string out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = pattern.find(key, start);
    if (pos == std::string_view::npos) break;
    out.append(pattern.substr(start, pos - start));
    out.append(replacement);
    start = pos + key.size();
  }
  out.append(pattern.substr(start));
  return out;
}

std::vector<std::string> StringList(const YAML::Node &node, const std::string &what) {
  std::vector<std::string> out;
  if (!node) return out;
  if (node.IsScalar()) {
    out.push_back(node.as<std::string>());
    return out;
  }
  if (!node.IsSequence()) throw ConfigError(what + " must be a list");
  for (const auto &item : node) out.push_back(item.as<std::string>());
  return out;
}

}  // namespace

const LexiconValue *LexiconAttribute::FindValue(std::string_view value) const {
  std::string norm = NormalizeValue(value);
  for (const LexiconValue &v : values) {
    if (NormalizeValue(v.value) == norm) return &v;
  }
  return nullptr;
}

Lexicon Lexicon::Parse(std::string_view yaml, const Ontology &ontology) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception &e) {
    throw ConfigError(std::string("lexicon: invalid YAML: ") + e.what());
  }
  Lexicon lex;
  lex.ontology_ = &ontology;

  auto add_pattern = [&](Pattern pattern, const std::string &surface) {
    pattern.text = NormalizeUtterance(surface);
    for (Token &t : Tokenize(pattern.text)) pattern.tokens.push_back(std::move(t.text));
    if (pattern.tokens.empty()) {
      throw ConfigError("lexicon: empty pattern for " + pattern.attribute + "[" +
                        pattern.value + "]");
    }
    lex.patterns_.push_back(std::move(pattern));
  };

  try {
    if (root["version"]) lex.version_ = root["version"].as<int>();
    if (const YAML::Node &neg = root["negation"]) {
      if (neg["window"]) lex.negation_window_ = neg["window"].as<int>();
      for (const std::string &cue : StringList(neg["cues"], "negation cues")) {
        lex.negation_cues_.push_back(NormalizeUtterance(cue));
      }
    }
    if (lex.negation_window_ < 0) throw ConfigError("lexicon: negative negation window");

    if (const YAML::Node &rec = root["recommend"]) {
      if (!ontology.has_recommend()) {
        throw ConfigError("lexicon: recommend cues for an ontology without RECOMMEND");
      }
      lex.recommend_template_ = rec["template"] ? rec["template"].as<std::string>() : "";
      for (const std::string &surface : StringList(rec["patterns"], "recommend patterns")) {
        Pattern p;
        p.attribute = std::string(kRecommendId);
        p.value = "yes";
        add_pattern(std::move(p), surface);
      }
    }

    const YAML::Node &attrs = root["attributes"];
    if (!attrs || !attrs.IsMap()) throw ConfigError("lexicon: missing attributes map");
    for (const auto &kv : attrs) {
      std::string id = kv.first.as<std::string>();
      const Attribute *attr = ontology.Find(id);
      if (attr == nullptr) {
        throw ConfigError("lexicon: attribute '" + id + "' is not in the ontology");
      }
      const YAML::Node &node = kv.second;
      LexiconAttribute la;
      la.id = attr->id;
      if (node["role"]) la.subject = node["role"].as<std::string>() == "subject";
      if (node["precedence"]) la.precedence = node["precedence"].as<int>();
      la.frames = StringList(node["frames"], id + " frames");
      if (node["template"]) la.clause_template = node["template"].as<std::string>();
      if (node["aggregate"]) la.aggregate = node["aggregate"].as<std::string>();
      if (const YAML::Node &neg = node["negate"]) {
        for (const auto &pair : neg) {
          la.negate[NormalizeValue(pair.first.as<std::string>())] =
              pair.second.as<std::string>();
        }
      }
      for (const auto &pair : node["values"]) {
        std::string key = CollapseWhitespace(pair.first.as<std::string>());
        LexiconValue lv;
        auto canonical = attr->CanonicalValue(key);
        lv.in_domain = canonical.has_value();
        lv.value = canonical ? *canonical : key;
        lv.words = StringList(pair.second, id + "[" + key + "]");
        if (lv.words.empty()) {
          throw ConfigError("lexicon: no surface words for " + id + "[" + key + "]");
        }
        la.values.push_back(std::move(lv));
      }
      if (const YAML::Node &templates = node["templates"]) {
        for (const auto &pair : templates) {
          std::string key = pair.first.as<std::string>();
          auto canonical = attr->CanonicalValue(key);
          if (!canonical) {
            throw ConfigError("lexicon: template for unknown value " + id + "[" + key + "]");
          }
          la.value_templates[*canonical] = pair.second.as<std::string>();
        }
      }
      for (auto &[from, to] : la.negate) {
        auto canonical = attr->CanonicalValue(to);
        if (!canonical || !attr->Accepts(from)) {
          throw ConfigError("lexicon: negation of " + id + " leaves the domain");
        }
        to = *canonical;
      }

      for (const LexiconValue &lv : la.values) {
        for (const std::string &word : lv.words) {
          std::vector<std::string> surfaces;
          if (la.frames.empty()) {
            surfaces.push_back(word);
          } else {
            for (const std::string &frame : la.frames) {
              surfaces.push_back(Substitute(frame, "{w}", word));
            }
          }
          for (const std::string &surface : surfaces) {
            Pattern p;
            p.attribute = la.id;
            p.value = lv.value;
            p.in_domain = lv.in_domain;
            p.negatable = !la.negate.empty();
            p.precedence = la.precedence;
            add_pattern(std::move(p), surface);
          }
        }
      }
      if (lex.Find(la.id) != nullptr) {
        throw ConfigError("lexicon: attribute '" + la.id + "' listed twice");
      }
      lex.attributes_.push_back(std::move(la));
    }
  } catch (const YAML::Exception &e) {
    throw ConfigError(std::string("lexicon: ") + e.what());
  }

  for (std::size_t i = 0; i < lex.patterns_.size(); ++i) {
    lex.index_[lex.patterns_[i].tokens[0]].push_back(static_cast<int>(i));
  }
  return lex;
}

const std::vector<int> *Lexicon::PatternsStartingWith(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? nullptr : &it->second;
}

bool Lexicon::IsNegationCue(std::string_view token) const {
  return std::find(negation_cues_.begin(), negation_cues_.end(), token) !=
         negation_cues_.end();
}

const LexiconAttribute *Lexicon::Find(std::string_view attribute) const {
  for (const LexiconAttribute &la : attributes_) {
    if (EqualsIgnoreCase(la.id, attribute)) return &la;
  }
  return nullptr;
}

std::string Lexicon::Predicate(std::string_view attribute, std::string_view value) const {
  auto gap = [&](const std::string &why) {
    return ConfigError("template gap for " + std::string(attribute) + "[" +
                       std::string(value) + "]: " + why);
  };
  const LexiconAttribute *la = Find(attribute);
  if (la == nullptr) throw gap("attribute not in lexicon");
  const Attribute *attr = ontology_->Find(attribute);
  std::string canonical = std::string(value);
  if (attr != nullptr) {
    if (auto c = attr->CanonicalValue(value)) canonical = *c;
  }
  std::string tmpl;
  if (auto it = la->value_templates.find(canonical); it != la->value_templates.end()) {
    tmpl = it->second;
  } else {
    tmpl = la->clause_template;
  }
  if (tmpl.empty()) throw gap("no template");
  if (tmpl.find("{w}") != std::string::npos) {
    const LexiconValue *lv = la->FindValue(canonical);
    if (lv == nullptr) throw gap("no surface word");
    tmpl = Substitute(tmpl, "{w}", lv->words.front());
  }
  return Substitute(tmpl, "{value}", canonical);
}

std::optional<std::string> Lexicon::AggregatePhrase(std::string_view attribute,
                                                    std::string_view value) const {
  const LexiconAttribute *la = Find(attribute);
  if (la == nullptr || la->aggregate.empty()) return std::nullopt;
  const LexiconValue *lv = la->FindValue(value);
  if (lv == nullptr) {
    throw ConfigError("template gap for " + std::string(attribute) + "[" +
                      std::string(value) + "]: no surface word");
  }
  return Substitute(la->aggregate, "{w}", lv->words.front());
}

std::vector<std::string> Lexicon::CoverageGaps() const {
  std::vector<std::string> gaps;
  auto check_value = [&](const Attribute &attr, const LexiconAttribute &la,
                         const std::string &value) {
    const LexiconValue *lv = la.FindValue(value);
    if (lv == nullptr || !lv->in_domain) {
      gaps.push_back(attr.id + "[" + value + "]: no surface pattern");
    }
    if (la.subject) return;
    try {
      Predicate(attr.id, value);
      AggregatePhrase(attr.id, value);
    } catch (const ConfigError &e) {
      gaps.push_back(attr.id + "[" + value + "]: " + e.what());
    }
  };
  for (const Attribute &attr : ontology_->attributes()) {
    const LexiconAttribute *la = Find(attr.id);
    if (la == nullptr) {
      gaps.push_back(attr.id + ": not in lexicon");
      continue;
    }
    if (!attr.open) {
      for (const std::string &value : attr.values) check_value(attr, *la, value);
    }
    if (attr.has_placeholder()) check_value(attr, *la, attr.placeholder());
    if (attr.open && !attr.has_placeholder() && la->clause_template.empty()) {
      gaps.push_back(attr.id + ": open attribute without template");
    }
  }
  if (ontology_->has_recommend()) {
    bool cue = std::any_of(patterns_.begin(), patterns_.end(), [](const Pattern &p) {
      return p.attribute == kRecommendId;
    });
    if (!cue) gaps.push_back("recommend: no cue pattern");
    if (recommend_template_.empty()) gaps.push_back("recommend: no template");
  }
  return gaps;
}

const Lexicon &DefaultLexicon() {
  static const Lexicon lexicon = [] {
    Lexicon lex = Lexicon::Parse(DefaultLexiconText(), DefaultOntology());
    std::vector<std::string> gaps = lex.CoverageGaps();
    if (!gaps.empty()) throw ConfigError("bundled lexicon has gaps: " + gaps.front());
    return lex;
  }();
  return lexicon;
}

}  // namespace mrforge
