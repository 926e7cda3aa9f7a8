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

#include "mrforge/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"
#include "mrforge/error.h"
#include "mrforge/rng.h"
#include "mrforge/text.h"

namespace mrforge {
namespace {

using json = nlohmann::json;

// Splits one CSV record. Returns false with `error` set on bad quoting.
bool SplitCsvLine(std::string_view line, std::vector<std::string> *fields,
                  std::string *error) {
  fields->clear();
  std::string field;
  std::size_t i = 0;
  while (true) {
    field.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        field.push_back(line[i++]);
      }
      if (!closed) {
        *error = "unbalanced quotes";
        return false;
      }
      if (i < line.size() && line[i] != ',') {
        *error = "text after closing quote";
        return false;
      }
    } else {
      while (i < line.size() && line[i] != ',') {
        if (line[i] == '"') {
          *error = "quote inside unquoted field";
          return false;
        }
        field.push_back(line[i++]);
      }
    }
    fields->push_back(field);
    if (i >= line.size()) return true;
    ++i;  // comma
  }
}

bool IsHeader(const std::vector<std::string> &fields) {
  return fields.size() == 2 && NormalizeValue(fields[0]) == "mr" &&
         (NormalizeValue(fields[1]) == "ref" || NormalizeValue(fields[1]) == "utterance");
}

// Occurrences of `needle` in `haystack` compared under FoldForSearch, as
// byte ranges of the original haystack.
std::vector<std::pair<std::size_t, std::size_t>> FindFolded(std::string_view haystack,
                                                            std::string_view needle) {
  std::vector<std::size_t> offsets;
  std::string folded_haystack = FoldForSearch(haystack, &offsets);
  std::string folded_needle = FoldForSearch(CollapseWhitespace(needle));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (folded_needle.empty()) return out;
  std::size_t pos = 0;
  while ((pos = folded_haystack.find(folded_needle, pos)) != std::string::npos) {
    out.emplace_back(offsets[pos], offsets[pos + folded_needle.size()]);
    pos += folded_needle.size();
  }
  return out;
}

}  // namespace

CorpusFormat ParseCorpusFormat(std::string_view name) {
  std::string n = NormalizeValue(name);
  if (n == "e2e-csv" || n == "e2e_csv") return CorpusFormat::kE2eCsv;
  if (n == "nyc-tsv" || n == "nyc_tsv") return CorpusFormat::kNycTsv;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

std::string_view InstanceSourceName(InstanceSource source) {
  switch (source) {
    case InstanceSource::kNyc: return "nyc";
    case InstanceSource::kE2e: return "e2e";
    case InstanceSource::kSelf: return "self";
  }
  return "?";
}

InstanceSource ParseInstanceSource(std::string_view name) {
  std::string n = NormalizeValue(name);
  if (n == "nyc") return InstanceSource::kNyc;
  if (n == "e2e") return InstanceSource::kE2e;
  if (n == "self") return InstanceSource::kSelf;
  throw DataError("unknown instance source '" + std::string(name) + "'");
}

IngestResult IngestText(std::string_view text, CorpusFormat format) {
  IngestResult result;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::string> lines = Split(text, '\n');
  std::vector<std::string> fields;
  std::string error;
  bool first = true;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string line = lines[n];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (CollapseWhitespace(line).empty()) continue;
    std::size_t line_no = n + 1;
    bool ok;
    if (format == CorpusFormat::kE2eCsv) {
      ok = SplitCsvLine(line, &fields, &error);
    } else {
      fields = Split(line, '\t');
      ok = true;
    }
    if (ok && first && IsHeader(fields)) {
      first = false;
      continue;
    }
    first = false;
    ++result.rows;
    if (ok && fields.size() != 2) {
      ok = false;
      error = "expected 2 fields, found " + std::to_string(fields.size());
    }
    if (ok && (CollapseWhitespace(fields[0]).empty() || CollapseWhitespace(fields[1]).empty())) {
      ok = false;
      error = "empty field";
    }
    if (!ok) {
      result.errors.push_back({line_no, error});
      continue;
    }
    result.pairs.push_back({fields[0], fields[1], line_no});
  }
  if (result.rows == 0) result.warnings.push_back("zero data rows");
  if (result.errors.size() * 20 > result.rows) {
    const RowError &e = result.errors.front();
    throw DataError(std::to_string(result.errors.size()) + " of " +
                    std::to_string(result.rows) + " rows malformed (first at line " +
                    std::to_string(e.line) + ": " + e.message + ")");
  }
  return result;
}

IngestResult IngestSource(const std::string &path, CorpusFormat format) {
  return IngestText(ReadFileOrThrow(path), format);
}

RelabelResult RelabelToCombined(const std::vector<RawPair> &pairs, Source source,
                                const AttributeMap &attribute_map,
                                const Ontology &ontology) {
  RelabelResult result;
  for (const RawPair &pair : pairs) {
    try {
      TrainingInstance inst;
      inst.source = source == Source::kE2e ? InstanceSource::kE2e : InstanceSource::kNyc;
      inst.utterance = CollapseWhitespace(pair.utterance);
      std::set<std::string> seen;
      for (const RawSlot &raw : ParseSlots(pair.mr)) {
        if (EqualsIgnoreCase(raw.attribute, kRecommendId)) {
          if (!ontology.has_recommend()) throw DataError("RECOMMEND not in ontology");
          inst.mr.recommend = NormalizeValue(raw.value) != "no";
          continue;
        }
        std::string id = attribute_map.Map(source, CollapseWhitespace(raw.attribute));
        const Attribute *attr = ontology.Find(id);
        if (attr == nullptr) {
          throw DataError("unknown source attribute '" + raw.attribute + "'");
        }
        if (!seen.insert(attr->id).second) {
          throw DataError("repeated attribute " + attr->id);
        }
        std::string value = CollapseWhitespace(raw.value);
        if (auto canonical = attr->CanonicalValue(value)) {
          value = *canonical;
        } else if (!attr->has_placeholder()) {
          throw DataError("value '" + value + "' out of domain for " + attr->id);
        }
        inst.mr.slots.push_back({attr->id, value});
      }
      SortCanonical(&inst.mr, ontology);
      inst.mr.provenance = source == Source::kE2e ? Provenance::kE2e : Provenance::kNyc;
      result.instances.push_back(std::move(inst));
    } catch (const Error &e) {
      result.rejections.push_back({pair.line, e.what()});
    }
  }
  return result;
}

TrainingInstance Delexicalize(const TrainingInstance &instance, const Ontology &ontology,
                              int *replaced) {
  TrainingInstance out = instance;
  int count = 0;
  bool missing = false;
  for (Slot &slot : out.mr.slots) {
    const Attribute *attr = ontology.Find(slot.attribute);
    if (attr == nullptr || !attr->has_placeholder()) continue;
    if (EqualsIgnoreCase(slot.value, attr->placeholder())) continue;
    if (!attr->open && attr->Accepts(slot.value)) continue;
    auto ranges = FindFolded(out.utterance, slot.value);
    if (ranges.empty()) {
      missing = true;
      continue;
    }
    for (auto it = ranges.rbegin(); it != ranges.rend(); ++it) {
      out.utterance.replace(it->first, it->second - it->first, attr->placeholder());
    }
    slot.value = attr->placeholder();
    ++count;
  }
  out.flagged = missing;
  if (replaced != nullptr) *replaced = count;
  return out;
}

long Corpus::Count(InstanceSource source) const {
  return std::count_if(instances.begin(), instances.end(),
                       [&](const TrainingInstance &i) { return i.source == source; });
}

Corpus BuildBalancedTrain(const std::vector<TrainingInstance> &nyc,
                          const std::vector<TrainingInstance> &e2e, std::uint64_t seed) {
  if (e2e.size() < nyc.size()) {
    throw DataError("insufficient E2E data: " + std::to_string(e2e.size()) +
                    " instances for " + std::to_string(nyc.size()) + " NYC instances");
  }
  Corpus corpus;
  corpus.seed = seed;
  corpus.instances = nyc;
  std::vector<std::size_t> order(e2e.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(DeriveSeed(seed, "corpus/balance"));
  for (std::size_t i = 0; i < nyc.size(); ++i) {
    std::size_t j = i + rng.Below(order.size() - i);
    std::swap(order[i], order[j]);
    corpus.instances.push_back(e2e[order[i]]);
  }
  return corpus;
}

std::string InstanceToJson(const TrainingInstance &instance) {
  json j;
  j["mr"] = FormatMr(instance.mr);
  j["utterance"] = instance.utterance;
  j["source"] = InstanceSourceName(instance.source);
  j["round"] = instance.round;
  if (instance.flagged) j["flagged"] = true;
  return j.dump();
}

TrainingInstance InstanceFromJson(std::string_view line, const Ontology &ontology) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception &e) {
    throw ParseError(std::string("bad JSON record: ") + e.what(), 0);
  }
  if (!j.is_object() || !j.contains("mr") || !j.contains("utterance")) {
    throw DataError("record lacks mr/utterance");
  }
  try {
    TrainingInstance inst;
    inst.mr = ParseMr(j.at("mr").get<std::string>(), ontology);
    inst.utterance = j.at("utterance").get<std::string>();
    inst.source = ParseInstanceSource(j.value("source", "nyc"));
    inst.round = j.value("round", 0);
    inst.flagged = j.value("flagged", false);
    if (inst.source == InstanceSource::kNyc) inst.mr.provenance = Provenance::kNyc;
    if (inst.source == InstanceSource::kE2e) inst.mr.provenance = Provenance::kE2e;
    return inst;
  } catch (const json::exception &e) {
    throw DataError(std::string("bad record field: ") + e.what());
  }
}

void WriteInstances(const std::string &path, const std::vector<TrainingInstance> &instances) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const TrainingInstance &inst : instances) out << InstanceToJson(inst) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

void AppendInstances(const std::string &path, const std::vector<TrainingInstance> &instances) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to '" + path + "'");
  for (const TrainingInstance &inst : instances) out << InstanceToJson(inst) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<TrainingInstance> ReadInstances(const std::string &path, const Ontology &ontology) {
  std::string text = ReadFileOrThrow(path);
  std::vector<TrainingInstance> out;
  std::vector<std::string> lines = Split(text, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (CollapseWhitespace(lines[n]).empty()) continue;
    try {
      out.push_back(InstanceFromJson(lines[n], ontology));
    } catch (const Error &e) {
      throw ParseError(path + ":" + std::to_string(n + 1) + ": " + e.what(), 0, n + 1);
    }
  }
  return out;
}

}  // namespace mrforge
