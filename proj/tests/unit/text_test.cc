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

#include "mrforge/text.h"

#include "doctest.h"
#include "mrforge/rng.h"

namespace mrforge {
namespace {

TEST_CASE("CollapseWhitespace trims and squeezes") {
  CHECK(CollapseWhitespace("  a \t b\n\nc  ") == "a b c");
  CHECK(CollapseWhitespace("   ") == "");
}

TEST_CASE("AsciiLower leaves multibyte sequences alone") {
  CHECK(AsciiLower("Caf\xC3\x89 ABC") == "caf\xC3\x89 abc");
}

TEST_CASE("Split keeps empty fields") {
  CHECK(Split("a,,b,", ',') == std::vector<std::string>{"a", "", "b", ""});
  CHECK(Split("", ',') == std::vector<std::string>{""});
}

TEST_CASE("Tokenize peels sentence punctuation but keeps placeholders") {
  std::vector<Token> tokens = Tokenize("[RESTAURANT] is near £20-25, (riverside).");
  std::vector<std::string> texts;
  for (const Token &t : tokens) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"[RESTAURANT]", "is", "near", "£20-25", ",", "(",
                                          "riverside", ")", "."});
  std::string s = "[RESTAURANT] is near £20-25, (riverside).";
  for (const Token &t : tokens) CHECK(s.substr(t.begin, t.end - t.begin) == t.text);
}

TEST_CASE("sentence boundaries") {
  CHECK(IsSentenceBoundary("."));
  CHECK(IsSentenceBoundary(";"));
  CHECK_FALSE(IsSentenceBoundary(","));
}

TEST_CASE("FoldForSearch strips accents and case") {
  CHECK(FoldForSearch("Caf\xC3\xA9 Sicilia") == FoldForSearch("CAFE SICILIA"));
  // Decomposed e + combining acute.
  CHECK(FoldForSearch("Cafe\xCC\x81") == "cafe");
}

TEST_CASE("FoldForSearch offsets point back into the source") {
  std::string text = "x Caf\xC3\xA9 y";
  std::vector<std::size_t> offsets;
  std::string folded = FoldForSearch(text, &offsets);
  REQUIRE(offsets.size() == folded.size() + 1);
  CHECK(offsets.back() == text.size());
  std::size_t at = folded.find("cafe");
  REQUIRE(at != std::string::npos);
  CHECK(offsets[at] == 2);
  CHECK(offsets[at + 4] == 2 + 5);
}

TEST_CASE("Rng is reproducible and seeds derive by label") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.Next() == b.Next());
  CHECK(DeriveSeed(1, "x") == DeriveSeed(1, "x"));
  CHECK(DeriveSeed(1, "x") != DeriveSeed(1, "y"));
  CHECK(DeriveSeed(1, "x") != DeriveSeed(2, "x"));
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    double u = r.Uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.Below(5) < 5);
  }
}

}  // namespace
}  // namespace mrforge
