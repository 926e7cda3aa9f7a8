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

#ifndef MRFORGE_TEXT_H_
#define MRFORGE_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mrforge {

// ASCII lowercase; bytes >= 0x80 are left alone so UTF-8 stays intact.
std::string AsciiLower(std::string_view text);

// Trims and collapses runs of whitespace into single spaces.
std::string CollapseWhitespace(std::string_view text);

// Utterance normalization used everywhere text is compared against the
// lexicon: lowercase, collapsed whitespace, punctuation kept.
std::string NormalizeUtterance(std::string_view text);

// Normalized form of an MR value for case/whitespace-insensitive equality.
std::string NormalizeValue(std::string_view value);

bool EqualsIgnoreCase(std::string_view a, std::string_view b);

std::vector<std::string> Split(std::string_view text, char separator);

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte range in the tokenized string
  std::size_t end = 0;
};

// Splits on whitespace, then peels sentence punctuation (. , ; : ! ? ( ) ")
// off both ends of every chunk into tokens of their own. Brackets, slashes
// and hyphens stay inside tokens, so "[restaurant]" and "£20-25" survive.
std::vector<Token> Tokenize(std::string_view text);

// True for tokens that end a negation window (. ! ? ;).
bool IsSentenceBoundary(std::string_view token);

// Unicode-aware folding for fuzzy literal search: NFKD, combining marks
// removed, case folded. `offsets` (optional) receives, for every byte of the
// folded string, the byte offset in `text` of the code point it came from,
// plus one trailing entry equal to text.size().
std::string FoldForSearch(std::string_view text,
                          std::vector<std::size_t> *offsets = nullptr);

}  // namespace mrforge

#endif  // MRFORGE_TEXT_H_
