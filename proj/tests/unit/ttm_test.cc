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

#include "mrforge/ttm.h"

#include "doctest.h"
#include "mrforge/metrics.h"
#include "mrforge/generator.h"
#include "mrforge/lexicon.h"
#include "test_util.h"

namespace mrforge {
namespace {

const Lexicon &Lex() { return DefaultLexicon(); }
const Ontology &Ont() { return DefaultLexicon().ontology(); }
MeaningRepresentation Mr(std::string_view text) { return ParseMr(text, Ont()); }

ErrorCounts Count(std::string_view mr, std::string_view text) {
  return ClassifyErrors(Mr(mr), ExtractMr(text, Lex()), Ont());
}

ErrorCounts Counts(int d, int r, int s, int h, int n) { return {d, r, s, h, n}; }

TEST_CASE("align finds slot spans") {
  std::vector<AlignmentSpan> spans =
      Align("it has good food and it is not family friendly", Lex());
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].attribute == "qual");
  CHECK(spans[0].value == "good");
  CHECK(spans[1].attribute == "familyFriendly");
  CHECK(spans[1].value == "no");
  CHECK(spans[1].negated);
  CHECK(Align("", Lex()).empty());
}

TEST_CASE("recommend cue") {
  std::vector<AlignmentSpan> spans = Align("[RESTAURANT] is the best restaurant because", Lex());
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].attribute == "name");
  CHECK(spans[1].attribute == kRecommendId);
  CHECK(ExtractMr("[RESTAURANT] is the best restaurant because", Lex()).retrofit_mr.recommend);
}

TEST_CASE("negation does not cross a sentence boundary") {
  RetrofitResult r = ExtractMr("it is not cheap. it is family friendly.", Lex());
  const Slot *ff = r.retrofit_mr.Find("familyFriendly");
  REQUIRE(ff != nullptr);
  CHECK(ff->value == "yes");
}

TEST_CASE("out-of-domain values are flagged") {
  RetrofitResult r = ExtractMr("[restaurant] has friendly food.", Lex());
  CHECK(r.invalid_value_flag);
  REQUIRE(r.retrofit_mr.Find("qual") != nullptr);
  CHECK(r.retrofit_mr.Find("qual")->value == "friendly");
}

TEST_CASE("fast-food fixture: three deletions and a substitution") {
  std::string mr =
      "name[[RESTAURANT]], cuisine[fastfood], decor[good], qual[fantastic], "
      "location[riverside], price[cheap], eatType[pub], familyFriendly[no]";
  std::string text =
      "[restaurant] is a fast food restaurant located in the riverside area. it has good food "
      "and it is not family friendly.";
  RetrofitResult r = ExtractMr(text, Lex());
  CHECK(FormatMr(r.retrofit_mr) ==
        "cuisine[fastfood], location[riverside], name[[RESTAURANT]], qual[good], "
        "familyFriendly[no]");
  CHECK(Count(mr, text) == Counts(3, 0, 1, 0, 8));
}

TEST_CASE("fast-food fixture: recommend deleted") {
  CHECK(Count("name[RESTAURANT], recommend[yes], cuisine[fastfood], qual[good], "
              "location[riverside], familyFriendly[no]",
              "[restaurant] is a fast food restaurant in the riverside area. it is not family "
              "friendly and has good food.") == Counts(1, 0, 0, 0, 6));
}

TEST_CASE("one fixture per error type") {
  ErrorCounts del = Count(
      "name[[RESTAURANT]], cuisine[mexican], location[midtown], price[expensive], "
      "eatType[coffee shop], familyFriendly[no], near[[POINT-OF-INTEREST]]",
      "[RESTAURANT] is a coffee shop that is not family friendly. It is located in Midtown.");
  CHECK(del == Counts(3, 0, 0, 0, 7));

  ErrorCounts rep = Count(
      "name[[RESTAURANT]], decor[good], location[midtown west], eatType[coffee shop], "
      "rating[1 out of 5]",
      "[RESTAURANT] is a coffee shop in Midtown West with good ambiance. It is in Midtown West "
      "with good decor.");
  CHECK(rep == Counts(1, 2, 0, 0, 5));

  ErrorCounts sub = Count(
      "name[[RESTAURANT]], decor[good], qual[bad], location[tribeca/soho], eatType[pub]",
      "[RESTAURANT] is in Tribeca/Soho with good food and good decor. It is a pub.");
  CHECK(sub == Counts(0, 0, 1, 0, 5));

  ErrorCounts hall = Count(
      "name[[RESTAURANT]], decor[good], qual[good], location[riverside], "
      "near[[POINT-OF-INTEREST]]",
      "[RESTAURANT] is near [POINT-OF-INTEREST] in the riverside area. It has good food, good "
      "decor and good service.");
  CHECK(hall == Counts(0, 0, 0, 1, 5));
}

TEST_CASE("japanese fixture: triple location repeat") {
  RetrofitResult r = ExtractMr(
      "[restaurant] is the best restaurant since it is a japanese restaurant with bad ambiance "
      "and it is in midtown. it is in midtown. it is in midtown.",
      Lex());
  CHECK(r.repetition_flag);
  int locations = 0;
  for (const AlignmentSpan &s : r.spans) locations += s.attribute == "location";
  CHECK(locations == 3);
  CHECK(r.retrofit_mr.Find("location") != nullptr);
  ErrorCounts c = ClassifyErrors(
      Mr("name[restaurant], recommend[yes], cuisine[japanese], decor[bad], location[midtown], "
         "service[fantastic], rating[low], near[point-of-interest]"),
      r, Ont());
  CHECK(c == Counts(3, 2, 0, 0, 8));
}

TEST_CASE("price fixture: repeated price with a hallucinated cuisine") {
  RetrofitResult r = ExtractMr(
      "[restaurant] is a child friendly restaurant with french food and it is in the high price "
      "range. it is in the high price.",
      Lex());
  CHECK(r.repetition_flag);
  ErrorCounts c = ClassifyErrors(
      Mr("name[[RESTAURANT]], decor[fantastic], qual[acceptable], price[high], "
         "familyFriendly[yes]"),
      r, Ont());
  CHECK(c == Counts(2, 1, 0, 1, 5));
  CHECK(Ser(c).value() == doctest::Approx(0.8));
}

TEST_CASE("southern fixture: all four error types") {
  ErrorCounts c = Count(
      "name[[RESTAURANT]], cuisine[southern], decor[fantastic], location[city centre], "
      "price[cheap], service[good], eatType[coffee shop], familyFriendly[no]",
      "[restaurant] is a cheap, family friendly coffee shop with good food. it is in the city "
      "centre. it is not family friendly.");
  CHECK(c.deletions == 3);
  CHECK(c.repetitions == 1);
  CHECK(c.substitutions == 1);
  CHECK(c.hallucinations == 1);
  CHECK(Ser(c).value() == doctest::Approx(0.75));
}

TEST_CASE("identical input and output have zero errors") {
  std::string text = TemplateRealizer(Lex()).Realize(
      Mr("name[[RESTAURANT]], qual[good], familyFriendly[no]"));
  ErrorCounts c = Count("name[[RESTAURANT]], qual[good], familyFriendly[no]", text);
  CHECK(c.perfect());
  CHECK(c.slots == 3);
}

TEST_CASE("value comparison uses canonical spelling") {
  CHECK(SameValue(Ont(), "qual", "excellent", "fantastic"));
  CHECK(SameValue(Ont(), "name", "[restaurant]", "[RESTAURANT]"));
  CHECK_FALSE(SameValue(Ont(), "qual", "good", "bad"));
}

TEST_CASE("extraction is deterministic") {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    MeaningRepresentation mr = testing::RandomMr(Ont(), rng, 1, true);
    std::string text = TemplateRealizer(Lex()).Realize(mr);
    RetrofitResult a = ExtractMr(text, Lex());
    RetrofitResult b = ExtractMr(text, Lex());
    CHECK(a.spans == b.spans);
    CHECK(a.retrofit_mr == b.retrofit_mr);
  }
}

}  // namespace
}  // namespace mrforge
