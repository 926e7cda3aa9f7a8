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

#include "mrforge/metrics.h"

#include <fmt/format.h>

#include <algorithm>
#include <thread>

#include "mrforge/error.h"

namespace mrforge {

SlotErrorRate Ser(const ErrorCounts &counts) {
  if (counts.slots <= 0) throw DataError("SER undefined for an MR with no slots");
  return {counts.errors(), counts.slots};
}

bool SourceBlending(const std::vector<std::string> &attributes, const Ontology &ontology) {
  bool nyc = false;
  bool e2e = false;
  for (const std::string &id : attributes) {
    const Attribute *attr = ontology.Find(id);
    if (attr == nullptr) continue;
    nyc = nyc || attr->source == Source::kNyc;
    e2e = e2e || attr->source == Source::kE2e;
  }
  return nyc && e2e;
}

bool SourceBlending(const MeaningRepresentation &realized, const Ontology &ontology) {
  std::vector<std::string> ids;
  for (const Slot &slot : realized.slots) ids.push_back(slot.attribute);
  return SourceBlending(ids, ontology);
}

ScoredItem ScoreItem(const MeaningRepresentation &input, std::string utterance,
                     const Lexicon &lexicon) {
  ScoredItem item;
  item.input = input;
  item.utterance = std::move(utterance);
  item.result = ExtractMr(item.utterance, lexicon);
  item.errors = ClassifyErrors(input, item.result, lexicon.ontology());
  item.ser = Ser(item.errors);
  item.perfect = item.errors.perfect();
  item.sb = SourceBlending(item.result.retrofit_mr, lexicon.ontology());
  return item;
}

std::vector<ScoredItem> ScoreAll(const std::vector<MeaningRepresentation> &inputs,
                                 const std::vector<std::string> &utterances,
                                 const Lexicon &lexicon, int threads) {
  if (inputs.size() != utterances.size()) {
    throw DataError("record count mismatch: " + std::to_string(inputs.size()) +
                    " MRs vs " + std::to_string(utterances.size()) + " utterances");
  }
  std::vector<ScoredItem> items(inputs.size());
  std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  workers = std::min(workers, std::max<std::size_t>(1, inputs.size()));
  auto work = [&](std::size_t shard) {
    for (std::size_t i = shard; i < inputs.size(); i += workers) {
      items[i] = ScoreItem(inputs[i], utterances[i], lexicon);
    }
  };
  if (workers == 1) {
    work(0);
    return items;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(w);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (std::thread &t : pool) t.join();
  for (const auto &failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return items;
}

double CorpusSer(const std::vector<ScoredItem> &items) {
  if (items.empty()) throw DataError("corpus SER of an empty set");
  double sum = 0;
  for (const ScoredItem &item : items) sum += item.ser.value();
  return sum / static_cast<double>(items.size());
}

double PerfectRate(const std::vector<ScoredItem> &items) {
  if (items.empty()) throw DataError("perfect% of an empty set");
  long perfect = std::count_if(items.begin(), items.end(),
                               [](const ScoredItem &item) { return item.perfect; });
  return 100.0 * static_cast<double>(perfect) / static_cast<double>(items.size());
}

double CorpusSb(const std::vector<ScoredItem> &items) {
  if (items.empty()) throw DataError("SB rate of an empty set");
  long sb = std::count_if(items.begin(), items.end(),
                          [](const ScoredItem &item) { return item.sb; });
  return static_cast<double>(sb) / static_cast<double>(items.size());
}

Summary Summarize(const std::vector<ScoredItem> &items) {
  Summary s;
  s.count = static_cast<long>(items.size());
  if (items.empty()) return s;
  s.ser = CorpusSer(items);
  s.perfect = PerfectRate(items);
  s.sb = CorpusSb(items);
  for (const ScoredItem &item : items) {
    s.perfect_count += item.perfect ? 1 : 0;
    s.sb_count += item.sb ? 1 : 0;
  }
  return s;
}

std::vector<BreakdownRow> ReportBreakdowns(const std::vector<ScoredItem> &items,
                                           int min_length, int max_length) {
  std::vector<BreakdownRow> rows;
  for (int length = min_length; length <= max_length; ++length) {
    std::vector<ScoredItem> all, rec, no_rec;
    for (const ScoredItem &item : items) {
      if (item.input.length() != length) continue;
      all.push_back(item);
      (item.input.recommend ? rec : no_rec).push_back(item);
    }
    rows.push_back({length, Summarize(all), Summarize(rec), Summarize(no_rec)});
  }
  return rows;
}

std::string FormatSummary(const Summary &s) {
  return fmt::format("items     {}\nSER       {:.3f}\nperfect%  {:.2f} ({})\nSB        {:.3f} ({})\n",
                     s.count, s.ser, s.perfect, s.perfect_count, s.sb, s.sb_count);
}

std::string FormatBreakdowns(const std::vector<BreakdownRow> &rows) {
  std::string out = fmt::format("{:>3} | {:>5} {:>6} {:>8} {:>6} | {:>5} {:>6} {:>8} {:>6} | "
                                "{:>5} {:>6} {:>8} {:>6}\n",
                                "len", "n", "SER", "perfect%", "SB", "n.rec", "SER",
                                "perfect%", "SB", "n.no", "SER", "perfect%", "SB");
  auto cells = [](const Summary &s) {
    return fmt::format("{:>5} {:>6.3f} {:>8.2f} {:>6.3f}", s.count, s.ser, s.perfect, s.sb);
  };
  for (const BreakdownRow &row : rows) {
    out += fmt::format("{:>3} | {} | {} | {}\n", row.length, cells(row.all), cells(row.rec),
                       cells(row.no_rec));
  }
  return out;
}

}  // namespace mrforge
