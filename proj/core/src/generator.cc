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

#include "mrforge/generator.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

#include "mrforge/error.h"
#include "mrforge/text.h"

namespace mrforge {
namespace {

const Attribute *SubjectAttribute(const Lexicon &lexicon) {
  for (const Attribute &attr : lexicon.ontology().attributes()) {
    const LexiconAttribute *la = lexicon.Find(attr.id);
    if (la != nullptr && la->subject) return &attr;
  }
  return nullptr;
}

std::optional<std::string> SubjectOf(const MeaningRepresentation &mr, const Lexicon &lexicon) {
  const Attribute *subject = SubjectAttribute(lexicon);
  if (subject == nullptr) return std::nullopt;
  const Slot *slot = mr.Find(subject->id);
  if (slot == nullptr) return std::nullopt;
  return slot->value;
}

bool Hallucinatable(const Attribute &attr) {
  return attr.open ? attr.has_placeholder() : !attr.values.empty();
}

}  // namespace

std::vector<TemplateRealizer::Unit> TemplateRealizer::Units(
    const MeaningRepresentation &mr) const {
  const Attribute *subject = SubjectAttribute(*lexicon_);
  std::vector<Unit> units;
  if (mr.recommend) units.push_back({std::string(kRecommendId), "yes"});
  for (const Slot &slot : mr.slots) {
    if (subject != nullptr && EqualsIgnoreCase(slot.attribute, subject->id)) continue;
    units.push_back({slot.attribute, slot.value});
  }
  return units;
}

std::string TemplateRealizer::RealizeUnits(const std::vector<Unit> &units,
                                           const std::optional<std::string> &subject) const {
  std::vector<std::string> sentences;
  std::string current;
  int joined = 0;  // aggregate phrases attached to `current`
  bool current_aggregates = false;
  auto flush = [&] {
    if (!current.empty()) sentences.push_back(current);
    current.clear();
    joined = 0;
    current_aggregates = false;
  };
  for (const Unit &unit : units) {
    if (unit.attribute == kRecommendId) {
      flush();
      current = lexicon_->recommend_predicate();
      flush();
      continue;
    }
    std::optional<std::string> phrase = lexicon_->AggregatePhrase(unit.attribute, unit.value);
    if (phrase && current_aggregates) {
      current += (joined++ == 0 ? " with " : " and ") + *phrase;
      continue;
    }
    flush();
    current = lexicon_->Predicate(unit.attribute, unit.value);
    current_aggregates = phrase.has_value();
  }
  flush();

  if (sentences.empty()) {
    if (!subject) return "";
    return *subject + " is a place to eat.";
  }
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += ' ';
    out += (i == 0 && subject) ? *subject : std::string("it");
    out += ' ';
    out += sentences[i];
    out += '.';
  }
  return out;
}

std::string TemplateRealizer::Realize(const MeaningRepresentation &mr) const {
  MeaningRepresentation canonical = Canonicalize(mr, lexicon_->ontology());
  return RealizeUnits(Units(canonical), SubjectOf(canonical, *lexicon_));
}

void NoiseConfig::Validate() const {
  for (double p : {p_del, p_sub, p_hall, p_rep}) {
    if (!(p >= 0 && p <= 1)) throw ConfigError("noise probability outside [0, 1]");
  }
}

NoiseConfig NoiseConfig::Scaled(double factor) const {
  NoiseConfig out = *this;
  out.p_del *= factor;
  out.p_sub *= factor;
  out.p_hall *= factor;
  out.p_rep *= factor;
  return out;
}

Realization CorruptGenerate(const MeaningRepresentation &mr, const NoiseConfig &noise,
                            const Lexicon &lexicon, Rng &rng) {
  noise.Validate();
  const Ontology &ontology = lexicon.ontology();
  TemplateRealizer realizer(lexicon);
  MeaningRepresentation canonical = Canonicalize(mr, ontology);

  Realization out;
  out.injected.slots = canonical.slot_count();
  std::vector<TemplateRealizer::Unit> units;
  std::vector<int> ranks;
  for (TemplateRealizer::Unit unit : realizer.Units(canonical)) {
    double u_del = rng.Uniform();
    double u_sub = rng.Uniform();
    double u_pick = rng.Uniform();
    double u_rep = rng.Uniform();
    if (u_del < noise.p_del) {
      ++out.injected.deletions;
      out.edits.push_back({Edit::Kind::kDelete, unit.attribute, unit.value});
      continue;
    }
    const Attribute *attr = ontology.Find(unit.attribute);
    if (attr != nullptr && !attr->open && u_sub < noise.p_sub) {
      std::vector<std::string> others;
      for (const std::string &v : attr->values) {
        if (!SameValue(ontology, attr->id, v, unit.value)) others.push_back(v);
      }
      if (!others.empty()) {
        auto k = static_cast<std::size_t>(u_pick * static_cast<double>(others.size()));
        unit.value = others[std::min(k, others.size() - 1)];
        ++out.injected.substitutions;
        out.edits.push_back({Edit::Kind::kSubstitute, unit.attribute, unit.value});
      }
    }
    int rank = ontology.Rank(unit.attribute);
    units.push_back(unit);
    ranks.push_back(rank);
    if (u_rep < noise.p_rep) {
      units.push_back(unit);
      ranks.push_back(rank);
      ++out.injected.repetitions;
      out.edits.push_back({Edit::Kind::kRepeat, unit.attribute, unit.value});
    }
  }

  const Attribute *subject = SubjectAttribute(lexicon);
  auto insert = [&](TemplateRealizer::Unit unit) {
    int rank = ontology.Rank(unit.attribute);
    std::size_t at = 0;
    while (at < ranks.size() && ranks[at] <= rank) ++at;
    units.insert(units.begin() + static_cast<long>(at), unit);
    ranks.insert(ranks.begin() + static_cast<long>(at), rank);
    ++out.injected.hallucinations;
    out.edits.push_back({Edit::Kind::kHallucinate, unit.attribute, unit.value});
  };
  if (ontology.has_recommend()) {
    double u_hall = rng.Uniform();
    rng.Uniform();
    if (!canonical.recommend && u_hall < noise.p_hall) {
      insert({std::string(kRecommendId), "yes"});
    }
  }
  for (const Attribute &attr : ontology.attributes()) {
    if (&attr == subject || !Hallucinatable(attr)) continue;
    double u_hall = rng.Uniform();
    double u_pick = rng.Uniform();
    if (canonical.Has(attr.id) || u_hall >= noise.p_hall) continue;
    std::string value;
    if (attr.open) {
      value = attr.placeholder();
    } else {
      auto k = static_cast<std::size_t>(u_pick * static_cast<double>(attr.values.size()));
      value = attr.values[std::min(k, attr.values.size() - 1)];
    }
    insert({attr.id, value});
  }

  out.text = realizer.RealizeUnits(units, SubjectOf(canonical, lexicon));
  return out;
}

void Generator::Retrain(const RetrainMessage &) {}

std::vector<GenerationResult> TemplateGenerator::Generate(
    const std::vector<GenerationRequest> &requests) {
  std::vector<GenerationResult> results;
  results.reserve(requests.size());
  for (const GenerationRequest &request : requests) {
    GenerationResult result;
    result.id = request.id;
    try {
      result.text = realizer_.Realize(request.mr);
    } catch (const Error &e) {
      result.error = e.what();
    }
    results.push_back(std::move(result));
  }
  return results;
}

CorruptingGenerator::CorruptingGenerator(const Lexicon &lexicon, NoiseConfig noise)
    : lexicon_(&lexicon), noise_(noise) {
  noise_.Validate();
}

std::vector<GenerationResult> CorruptingGenerator::Generate(
    const std::vector<GenerationRequest> &requests) {
  std::vector<GenerationResult> results;
  results.reserve(requests.size());
  for (const GenerationRequest &request : requests) {
    GenerationResult result;
    result.id = request.id;
    try {
      Rng rng(DeriveSeed(noise_.seed, request.id));
      Realization r = CorruptGenerate(request.mr, noise_, *lexicon_, rng);
      result.text = std::move(r.text);
      result.injected = r.injected;
    } catch (const Error &e) {
      result.error = e.what();
    }
    results.push_back(std::move(result));
  }
  return results;
}

std::string CorruptingGenerator::Describe() const {
  return "corrupt:" + FormatNoiseSpec(noise_);
}

std::vector<GenerationResult> EchoGenerator::Generate(
    const std::vector<GenerationRequest> &requests) {
  std::vector<GenerationResult> results;
  results.reserve(requests.size());
  for (const GenerationRequest &request : requests) {
    results.push_back({request.id, FormatMr(request.mr), "", std::nullopt});
  }
  return results;
}

SurrogateLearner::SurrogateLearner(const Lexicon &lexicon, NoiseConfig base, double half)
    : lexicon_(&lexicon), base_(base), half_(half) {
  base_.Validate();
  if (!(half_ > 0)) throw ConfigError("surrogate half-life must be positive");
}

std::vector<GenerationResult> SurrogateLearner::Generate(
    const std::vector<GenerationRequest> &requests) {
  NoiseConfig noise = base_.Scaled(scale());
  std::vector<GenerationResult> results;
  results.reserve(requests.size());
  for (const GenerationRequest &request : requests) {
    GenerationResult result;
    result.id = request.id;
    try {
      MeaningRepresentation canonical = Canonicalize(request.mr, lexicon_->ontology());
      Rng rng(DeriveSeed(base_.seed, FormatMr(canonical)));
      Realization r = CorruptGenerate(canonical, noise, *lexicon_, rng);
      result.text = std::move(r.text);
      result.injected = r.injected;
    } catch (const Error &e) {
      result.error = e.what();
    }
    results.push_back(std::move(result));
  }
  return results;
}

void SurrogateLearner::Retrain(const RetrainMessage &message) {
  if (message.corpus_path.empty()) return;
  std::ifstream in(message.corpus_path);
  if (!in) throw DataError("cannot open '" + message.corpus_path + "'");
  long count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("\"source\":\"self\"") != std::string::npos) ++count;
  }
  self_instances_ = count;
}

std::string SurrogateLearner::Describe() const {
  return fmt::format("surrogate:{},half={}", FormatNoiseSpec(base_), half_);
}

NoiseConfig ParseNoiseSpec(std::string_view spec, double *half) {
  NoiseConfig noise;
  if (CollapseWhitespace(spec).empty()) return noise;
  for (const std::string &item : Split(spec, ',')) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("noise setting '" + item + "' lacks '='");
    std::string key = NormalizeValue(item.substr(0, eq));
    std::string value = CollapseWhitespace(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      if (key == "seed") {
        noise.seed = std::stoull(value, &used);
      } else {
        double v = std::stod(value, &used);
        if (key == "p_del") noise.p_del = v;
        else if (key == "p_sub") noise.p_sub = v;
        else if (key == "p_hall") noise.p_hall = v;
        else if (key == "p_rep") noise.p_rep = v;
        else if (key == "half" && half != nullptr) *half = v;
        else throw ConfigError("unknown noise setting '" + key + "'");
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error &) {
      throw ConfigError("bad value for noise setting '" + key + "': '" + value + "'");
    }
  }
  noise.Validate();
  return noise;
}

std::string FormatNoiseSpec(const NoiseConfig &noise) {
  return fmt::format("p_del={},p_sub={},p_hall={},p_rep={},seed={}", noise.p_del, noise.p_sub,
                     noise.p_hall, noise.p_rep, noise.seed);
}

}  // namespace mrforge
