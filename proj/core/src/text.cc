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

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cctype>

#include "mrforge/error.h"

namespace mrforge {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsPeelable(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '"':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string CollapseWhitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string NormalizeUtterance(std::string_view text) {
  return AsciiLower(CollapseWhitespace(text));
}

std::string NormalizeValue(std::string_view value) {
  return AsciiLower(CollapseWhitespace(value));
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> Split(std::string_view text, char separator) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(separator, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      return parts;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t begin = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    std::size_t end = i;

    std::vector<Token> trailing;
    while (begin < end && IsPeelable(text[begin])) {
      tokens.push_back({std::string(1, text[begin]), begin, begin + 1});
      ++begin;
    }
    while (end > begin && IsPeelable(text[end - 1])) {
      trailing.push_back({std::string(1, text[end - 1]), end - 1, end});
      --end;
    }
    if (begin < end) {
      tokens.push_back({std::string(text.substr(begin, end - begin)), begin, end});
    }
    tokens.insert(tokens.end(), trailing.rbegin(), trailing.rend());
  }
  return tokens;
}

bool IsSentenceBoundary(std::string_view token) {
  return token == "." || token == "!" || token == "?" || token == ";";
}

std::string FoldForSearch(std::string_view text,
                          std::vector<std::size_t> *offsets) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfkd = icu::Normalizer2::getNFKDInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFKD normalizer unavailable");

  std::string folded;
  if (offsets != nullptr) offsets->clear();
  const auto *bytes = reinterpret_cast<const uint8_t *>(text.data());
  int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    std::string piece;
    if (c < 0) {
      // Invalid UTF-8 byte: pass it through untouched.
      piece.assign(text.substr(start, i - start));
    } else {
      icu::UnicodeString decomposed =
          nfkd->normalize(icu::UnicodeString(c), status);
      if (U_FAILURE(status)) throw Error("ICU normalization failed");
      icu::UnicodeString kept;
      for (int32_t k = 0; k < decomposed.length();) {
        UChar32 cp = decomposed.char32At(k);
        if (u_charType(cp) != U_NON_SPACING_MARK) kept.append(cp);
        k += U16_LENGTH(cp);
      }
      kept.foldCase();
      kept.toUTF8String(piece);
    }
    folded += piece;
    if (offsets != nullptr) {
      offsets->insert(offsets->end(), piece.size(),
                      static_cast<std::size_t>(start));
    }
  }
  if (offsets != nullptr) offsets->push_back(text.size());
  return folded;
}

}  // namespace mrforge
