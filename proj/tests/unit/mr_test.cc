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

#include <set>

#include "doctest.h"
#include "mrforge/error.h"
#include "mrforge/testgen.h"
#include "test_util.h"

namespace mrforge {
namespace {

const Ontology &Ont() { return DefaultOntology(); }

MeaningRepresentation Mr(std::string_view text) { return ParseMr(text, Ont()); }

TEST_CASE("parse the canonical grammar") {
  MeaningRepresentation mr = Mr("recommend[yes], name[RESTAURANT], qual[excellent]");
  CHECK(mr.recommend);
  REQUIRE(mr.slots.size() == 2);
  CHECK(mr.slots[0] == Slot{"name", "[RESTAURANT]"});
  CHECK(mr.slots[1] == Slot{"qual", "fantastic"});
  CHECK(mr.slot_count() == 3);
  CHECK(mr.length() == 2);
  CHECK(mr.provenance == Provenance::kNyc);
}

TEST_CASE("dialogue-act wrappers flatten") {
  CHECK(Mr("inform(name[x], eatType[pub])") == Mr("name[x], eatType[pub]"));
  MeaningRepresentation rec = Mr("recommend(name[x], decor[good])");
  CHECK(rec.recommend);
  CHECK(rec.slots.size() == 2);
  CHECK(Mr("recommend[yes], inform(name[x])").recommend);
}

TEST_CASE("attribute ids are case-insensitive, values respelled") {
  MeaningRepresentation mr = Mr("EATTYPE[ Coffee   Shop ]");
  CHECK(mr.slots[0] == Slot{"eatType", "coffee shop"});
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(Mr(""), ParseError);
  CHECK_THROWS_AS(Mr("   "), ParseError);
  CHECK_THROWS_AS(Mr("name[x],"), ParseError);
  CHECK_THROWS_AS(Mr("name[x"), ParseError);
  CHECK_THROWS_AS(Mr("name x"), ParseError);
  CHECK_THROWS_AS(Mr("color[red]"), ParseError);
  CHECK_THROWS_AS(Mr("qual[good], qual[bad]"), ParseError);
  CHECK_THROWS_AS(Mr("recommend[maybe]"), ParseError);
  CHECK_THROWS_AS(Mr("request(name[x])"), ParseError);
  CHECK_THROWS_AS(Mr("inform(name[x]"), ParseError);
  CHECK_THROWS_AS(Mr("name[]"), ParseError);
  try {
    Mr("name[x], bogus[y]");
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    CHECK(e.position() == 9);
  }
}

TEST_CASE("nested brackets stay inside a value") {
  std::vector<RawSlot> slots = ParseSlots("name[[RESTAURANT]], near[[POINT-OF-INTEREST]]");
  REQUIRE(slots.size() == 2);
  CHECK(slots[0].value == "[RESTAURANT]");
  CHECK(slots[1].value == "[POINT-OF-INTEREST]");
}

TEST_CASE("validation reports every violation kind") {
  MeaningRepresentation repeated;
  repeated.slots = {{"name", "x"}, {"qual", "good"}, {"qual", "bad"}};
  ValidityReport r = ValidateMr(repeated, Ont());
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::kRepeatedAttribute);
  CHECK(r.violations[0].attribute == "qual");

  MeaningRepresentation friendly;
  friendly.slots = {{"qual", "friendly"}};
  r = ValidateMr(friendly, Ont());
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::kValueOutOfDomain);

  MeaningRepresentation unknown;
  unknown.slots = {{"color", "red"}};
  CHECK(ValidateMr(unknown, Ont()).violations[0].kind == Violation::Kind::kUnknownAttribute);

  CHECK(ValidateMr(Mr("name[x], decor[fantastic], rating[high]"), Ont()).ok());
  CHECK_THROWS_AS(Canonicalize(repeated, Ont()), DataError);
}

TEST_CASE("random repeated attributes are always rejected") {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    MeaningRepresentation mr = testing::RandomMr(Ont(), rng);
    Slot dup = mr.slots[rng.Below(mr.slots.size())];
    mr.slots.insert(mr.slots.begin() + rng.Below(mr.slots.size() + 1), dup);
    bool found = false;
    for (const Violation &v : ValidateMr(mr, Ont()).violations) {
      found |= v.kind == Violation::Kind::kRepeatedAttribute && v.attribute == dup.attribute;
    }
    CHECK(found);
  }
}

TEST_CASE("canonicalize sorts and is idempotent") {
  MeaningRepresentation reversed;
  reversed.slots = {{"near", "[POINT-OF-INTEREST]"}, {"decor", "good"}, {"name", "x"},
                    {"cuisine", "Fast Food"}};
  MeaningRepresentation c = Canonicalize(reversed, Ont());
  CHECK(FormatMr(c) == "cuisine[fastfood], name[x], decor[good], near[[POINT-OF-INTEREST]]");
  CHECK(Canonicalize(c, Ont()) == c);

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    MeaningRepresentation once = Canonicalize(testing::RandomMr(Ont(), rng), Ont());
    CHECK(Canonicalize(once, Ont()) == once);
  }
}

TEST_CASE("format and parse round-trip") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    MeaningRepresentation mr = Canonicalize(testing::RandomMr(Ont(), rng), Ont());
    mr.provenance = InferProvenance(mr, Ont());
    CHECK(Mr(FormatMr(mr)) == mr);
  }
  TestGenConfig config;
  for (const MeaningRepresentation &mr : GenerateComTestset(Ont(), config)) {
    CHECK(Mr(FormatMr(mr)) == mr);
  }
}

TEST_CASE("provenance comes from unique attributes") {
  CHECK(Mr("name[x], cuisine[thai]").provenance == Provenance::kBoth);
  CHECK(Mr("name[x], decor[good]").provenance == Provenance::kNyc);
  CHECK(Mr("name[x], eatType[pub]").provenance == Provenance::kE2e);
  CHECK(Mr("recommend[yes], eatType[pub]").provenance == Provenance::kBoth);
}

TEST_CASE("serialization under each supervision mode") {
  MeaningRepresentation both = Mr("name[x], decor[good], eatType[pub]");
  SerializedMr b = SerializeMr(both, SupervisionMode::kBool);
  REQUIRE(!b.tokens.empty());
  CHECK(b.tokens.back() == MrToken{"source", "True||True"});
  CHECK_FALSE(b.guide_hint);

  MeaningRepresentation rec = Mr("recommend[yes]");
  SerializedMr n = SerializeMr(rec, SupervisionMode::kNosup);
  CHECK(n.tokens == std::vector<MrToken>{{"recommend", "yes"}});

  MeaningRepresentation nyc = Mr("name[x], decor[good], qual[bad]");
  for (const MrToken &t : SerializeMr(nyc, SupervisionMode::kAttr).tokens) {
    CHECK(t.attribute.size() > std::string("_False||True").size());
    CHECK(t.attribute.substr(t.attribute.size() - 12) == "_False||True");
  }
  SerializedMr g = SerializeMr(Mr("name[x], eatType[pub]"), SupervisionMode::kGuideHint);
  REQUIRE(g.guide_hint);
  CHECK(*g.guide_hint == SourceBooleans{true, false});
  CHECK(SerializeMr(nyc, SupervisionMode::kNosup).ToString() == "name x decor good qual bad");
}

TEST_CASE("serialization is injective over canonical MRs") {
  Rng rng(5);
  for (SupervisionMode mode : {SupervisionMode::kNosup, SupervisionMode::kAttr,
                               SupervisionMode::kBool, SupervisionMode::kGuideHint}) {
    std::map<std::string, std::string> seen;
    for (int i = 0; i < 2000; ++i) {
      MeaningRepresentation mr = Canonicalize(testing::RandomMr(Ont(), rng), Ont());
      mr.provenance = InferProvenance(mr, Ont());
      SerializedMr s = SerializeMr(mr, mode);
      std::string key = s.ToString();
      for (const MrToken &t : s.tokens) key += "\x1f" + t.attribute + "\x1e" + t.value;
      if (s.guide_hint) key += FormatSourceBooleans(*s.guide_hint);
      auto [it, fresh] = seen.emplace(key, FormatMr(mr));
      if (!fresh) CHECK(it->second == FormatMr(mr));
    }
  }
}

TEST_CASE("supervision names round-trip") {
  for (SupervisionMode m : {SupervisionMode::kNosup, SupervisionMode::kAttr,
                            SupervisionMode::kBool, SupervisionMode::kGuideHint}) {
    CHECK(ParseSupervision(SupervisionName(m)) == m);
  }
  CHECK_THROWS_AS(ParseSupervision("loud"), ConfigError);
  CHECK(FormatSourceBooleans(SourceBooleansFor(Provenance::kE2e)) == "True||False");
  CHECK(FormatSourceBooleans(SourceBooleansFor(Provenance::kNyc)) == "False||True");
}

}  // namespace
}  // namespace mrforge
