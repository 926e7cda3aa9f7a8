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

#include <cmath>

#include "doctest.h"
#include "mrforge/error.h"
#include "mrforge/generator.h"
#include "mrforge/testgen.h"

namespace mrforge {
namespace {

const Lexicon &Lex() { return DefaultLexicon(); }
const Ontology &Ont() { return DefaultLexicon().ontology(); }

ScoredItem Item(double ser_errors, int slots, bool perfect, int length, bool rec, bool sb) {
  ScoredItem item;
  item.ser = {static_cast<int>(ser_errors), slots};
  item.perfect = perfect;
  item.sb = sb;
  item.input.recommend = rec;
  for (int i = 0; i < length; ++i) item.input.slots.push_back({"a" + std::to_string(i), "v"});
  return item;
}

TEST_CASE("slot error rate") {
  CHECK(Ser({3, 0, 1, 0, 8}).value() == doctest::Approx(0.5));
  CHECK(Ser({3, 0, 1, 0, 8}) == SlotErrorRate{1, 2});
  CHECK(Ser({0, 0, 0, 0, 6}).value() == 0.0);
  CHECK(Ser({4, 1, 1, 1, 6}).value() == doctest::Approx(7.0 / 6.0));
  CHECK(Ser({4, 1, 1, 1, 6}).value() > 1.0);
  CHECK_THROWS_AS(Ser({0, 0, 0, 0, 0}), DataError);
}

TEST_CASE("corpus aggregates") {
  std::vector<ScoredItem> items = {Item(0, 4, true, 4, false, true),
                                   Item(4, 4, false, 4, true, false)};
  CHECK(CorpusSer(items) == doctest::Approx(0.5));
  CHECK(PerfectRate(items) == doctest::Approx(50.0));
  CHECK(CorpusSb(items) == doctest::Approx(0.5));
  CHECK_THROWS_AS(CorpusSer({}), DataError);
  CHECK_THROWS_AS(PerfectRate({}), DataError);
  CHECK_THROWS_AS(CorpusSb({}), DataError);
  CHECK(Summarize({}).count == 0);

  std::vector<ScoredItem> many(3040, Item(1, 4, false, 4, false, false));
  for (int i = 0; i < 106; ++i) many[i] = Item(0, 4, true, 4, false, false);
  CHECK(PerfectRate(many) == doctest::Approx(3.4868).epsilon(1e-4));
  CHECK(std::round(PerfectRate(many) * 10) / 10 == doctest::Approx(3.5));
}

TEST_CASE("corpus ser of a concatenation is the weighted mean") {
  std::vector<ScoredItem> a = {Item(1, 4, false, 4, false, false), Item(0, 5, true, 5, false, true)};
  std::vector<ScoredItem> b = {Item(3, 3, false, 3, true, true), Item(2, 8, false, 8, false, true),
                               Item(7, 6, false, 6, true, true)};
  std::vector<ScoredItem> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  CHECK(CorpusSer(ab) == doctest::Approx((CorpusSer(a) * 2 + CorpusSer(b) * 3) / 5));
}

TEST_CASE("source blending on realized attributes") {
  CHECK_FALSE(SourceBlending({"name", "location", "price"}, Ont()));
  CHECK(SourceBlending({"familyFriendly", "decor"}, Ont()));
  CHECK_FALSE(SourceBlending({"decor", "qual"}, Ont()));
  MeaningRepresentation rec_only = ParseMr("recommend[yes], eatType[pub]", Ont());
  CHECK_FALSE(SourceBlending(rec_only, Ont()));
}

TEST_CASE("source blending matches enumeration on a six-attribute toy") {
  std::vector<Attribute> attrs(6);
  const Source sources[] = {Source::kShared, Source::kShared, Source::kNyc,
                            Source::kNyc,    Source::kE2e,    Source::kE2e};
  for (int i = 0; i < 6; ++i) {
    attrs[i].id = "a" + std::to_string(i);
    attrs[i].source = sources[i];
    attrs[i].values = {"v"};
  }
  Ontology toy("toy", 1, attrs, false);
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<std::string> ids;
    bool nyc = false, e2e = false;
    for (int i = 0; i < 6; ++i) {
      if (!(mask & (1 << i))) continue;
      ids.push_back(attrs[i].id);
      nyc |= sources[i] == Source::kNyc;
      e2e |= sources[i] == Source::kE2e;
    }
    CHECK(SourceBlending(ids, toy) == (nyc && e2e));
  }
}

TEST_CASE("blending is monotone under added attributes") {
  std::vector<std::string> ids = {"decor", "eatType"};
  REQUIRE(SourceBlending(ids, Ont()));
  for (const Attribute &a : Ont().attributes()) {
    std::vector<std::string> more = ids;
    more.push_back(a.id);
    CHECK(SourceBlending(more, Ont()));
  }
}

TEST_CASE("score all keeps input order and rejects mismatched counts") {
  TestGenConfig config;
  config.size = 200;
  std::vector<MeaningRepresentation> mrs = GenerateComTestset(Ont(), config);
  TemplateRealizer realizer(Lex());
  std::vector<std::string> texts;
  for (const auto &mr : mrs) texts.push_back(realizer.Realize(mr));
  std::vector<ScoredItem> one = ScoreAll(mrs, texts, Lex(), 1);
  std::vector<ScoredItem> four = ScoreAll(mrs, texts, Lex(), 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].utterance == four[i].utterance);
    CHECK(one[i].errors == four[i].errors);
    CHECK(one[i].perfect);
  }
  texts.pop_back();
  try {
    ScoreAll(mrs, texts, Lex());
    FAIL("expected DataError");
  } catch (const DataError &e) {
    std::string what = e.what();
    CHECK(what.find("200") != std::string::npos);
    CHECK(what.find("199") != std::string::npos);
  }
}

TEST_CASE("breakdowns partition by recommend") {
  std::vector<ScoredItem> items;
  for (int len = 3; len <= 10; ++len) {
    for (int k = 0; k < 4; ++k) items.push_back(Item(k % 2, len, k % 2 == 0, len, k < 2, k == 0));
  }
  std::vector<BreakdownRow> rows = ReportBreakdowns(items);
  REQUIRE(rows.size() == 8);
  for (const BreakdownRow &row : rows) {
    CHECK(row.all.count == row.rec.count + row.no_rec.count);
    CHECK(row.all.count == 4);
    CHECK(row.all.perfect == rows[0].all.perfect);
    CHECK(row.all.sb == rows[0].all.sb);
  }
  CHECK(FormatBreakdowns(rows).find("perfect%") != std::string::npos);
}

TEST_CASE("length-proportional noise gives a monotone SER row") {
  TestGenConfig config;
  config.size = 3040;
  std::vector<MeaningRepresentation> mrs = GenerateComTestset(Ont(), config);
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < mrs.size(); ++i) {
    NoiseConfig noise;
    noise.p_del = 0.04 * mrs[i].length();
    Rng rng(DeriveSeed(9, std::to_string(i)));
    texts.push_back(CorruptGenerate(mrs[i], noise, Lex(), rng).text);
  }
  std::vector<BreakdownRow> rows = ReportBreakdowns(ScoreAll(mrs, texts, Lex()));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].all.count < 30 || rows[i - 1].all.count < 30) continue;
    CHECK(rows[i].all.ser >= rows[i - 1].all.ser - 0.02);
  }
  CHECK(rows.back().all.ser > rows.front().all.ser);
}

TEST_CASE("noise-oracle corpus SER lies within three sigma of expectation") {
  TestGenConfig config;
  std::vector<MeaningRepresentation> mrs = GenerateComTestset(Ont(), config);
  const double p = 0.2;
  std::vector<std::string> texts;
  double expected = 0, variance = 0;
  for (std::size_t i = 0; i < mrs.size(); ++i) {
    NoiseConfig noise;
    noise.p_del = p;
    Rng rng(DeriveSeed(17, std::to_string(i)));
    texts.push_back(CorruptGenerate(mrs[i], noise, Lex(), rng).text);
    // Deletions hit every unit but the name; N counts the name too.
    double units = mrs[i].slot_count() - 1, n = mrs[i].slot_count();
    expected += units * p / n;
    variance += units * p * (1 - p) / (n * n);
  }
  double m = static_cast<double>(mrs.size());
  expected /= m;
  double sigma = std::sqrt(variance) / m;
  double observed = CorpusSer(ScoreAll(mrs, texts, Lex()));
  CHECK(std::abs(observed - expected) < 3 * sigma);
}

}  // namespace
}  // namespace mrforge
