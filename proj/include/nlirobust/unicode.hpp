// Copyright 2026 The nlirobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Thin UTF-8 helpers over ICU: codepoint iteration, character classes,
// case mapping and UAX #29 word segmentation.

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nlirobust/error.hpp"

namespace nlirobust::unicode {

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

// Calls f(codepoint, begin, end) for every codepoint. Ill-formed sequences
// are reported as U+FFFD covering the offending bytes.
template <typename F>
void for_each_codepoint(std::string_view text, F&& f) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    f(static_cast<char32_t>(c), static_cast<std::size_t>(start),
      static_cast<std::size_t>(i));
  }
}

inline std::vector<char32_t> codepoints(std::string_view text) {
  std::vector<char32_t> out;
  for_each_codepoint(text, [&](char32_t c, std::size_t, std::size_t) {
    out.push_back(c);
  });
  return out;
}

inline void append_utf8(std::string& out, char32_t c) {
  std::uint8_t buf[4];
  std::int32_t n = 0;
  UBool err = false;
  U8_APPEND(buf, n, 4, static_cast<UChar32>(c), err);
  if (err) {
    out += "\xEF\xBF\xBD";
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

inline std::string to_utf8(char32_t c) {
  std::string out;
  append_utf8(out, c);
  return out;
}

inline bool is_valid_utf8(std::string_view text) {
  bool ok = true;
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (ok && i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    ok = c >= 0;
  }
  return ok;
}

inline bool is_whitespace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' ||
         u_isUWhiteSpace(static_cast<UChar32>(c));
}

// Control characters, excluding the whitespace controls.
inline bool is_control(char32_t c) {
  if (c == U'\t' || c == U'\n' || c == U'\r') return false;
  const auto cat = u_charType(static_cast<UChar32>(c));
  return cat == U_CONTROL_CHAR || cat == U_FORMAT_CHAR;
}

// ASCII non-alphanumeric printables count as punctuation even where Unicode
// files them under symbols ("$", "^", "`"), matching BERT's basic tokenizer.
inline bool is_punctuation(char32_t c) {
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
      (c >= 123 && c <= 126)) {
    return true;
  }
  return u_ispunct(static_cast<UChar32>(c));
}

inline bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

inline bool is_number(char32_t c) {
  const auto cat = u_charType(static_cast<UChar32>(c));
  return cat == U_DECIMAL_DIGIT_NUMBER || cat == U_LETTER_NUMBER ||
         cat == U_OTHER_NUMBER;
}

inline bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0x2A700 && c <= 0x2B73F) ||
         (c >= 0x2B740 && c <= 0x2B81F) || (c >= 0x2B820 && c <= 0x2CEAF) ||
         (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x2F800 && c <= 0x2FA1F);
}

// Pictographic emoji and regional indicators. Keycap bases (#, *, digits)
// carry the Emoji property but are deliberately excluded.
inline bool is_emoji(char32_t c) {
  const auto cp = static_cast<UChar32>(c);
  return u_hasBinaryProperty(cp, UCHAR_EXTENDED_PICTOGRAPHIC) ||
         u_hasBinaryProperty(cp, UCHAR_REGIONAL_INDICATOR) ||
         (u_hasBinaryProperty(cp, UCHAR_EMOJI_PRESENTATION) && c > 0x7F);
}

inline bool contains_emoji(std::string_view text) {
  bool found = false;
  for_each_codepoint(text, [&](char32_t c, std::size_t, std::size_t) {
    found = found || is_emoji(c);
  });
  return found;
}

inline bool is_nonspacing_mark(char32_t c) {
  return u_charType(static_cast<UChar32>(c)) == U_NON_SPACING_MARK;
}

inline std::string to_lower(std::string_view text) {
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(),
                                                static_cast<int32_t>(text.size())))
      .toLower(icu::Locale::getRoot())
      .toUTF8String(out);
  return out;
}

// Full case folding; used for all case-insensitive lexicon lookups.
inline std::string fold_case(std::string_view text) {
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(),
                                                static_cast<int32_t>(text.size())))
      .foldCase()
      .toUTF8String(out);
  return out;
}

// Canonical decomposition followed by removal of nonspacing marks.
inline std::string strip_accents(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFD normaliser unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString decomposed = nfd->normalize(src, status);
  if (U_FAILURE(status)) throw Error("ICU NFD normalisation failed");
  std::string utf8;
  decomposed.toUTF8String(utf8);
  std::string out;
  out.reserve(utf8.size());
  for_each_codepoint(utf8, [&](char32_t c, std::size_t b, std::size_t e) {
    if (!is_nonspacing_mark(c)) out.append(utf8, b, e - b);
  });
  return out;
}

inline bool starts_upper(std::string_view text) {
  bool upper = false;
  bool first = true;
  for_each_codepoint(text, [&](char32_t c, std::size_t, std::size_t) {
    if (first) upper = u_isupper(static_cast<UChar32>(c));
    first = false;
  });
  return upper;
}

// Upper-cases the first codepoint only.
inline std::string capitalize_first(std::string_view text) {
  if (text.empty()) return {};
  std::string out;
  bool first = true;
  for_each_codepoint(text, [&](char32_t c, std::size_t b, std::size_t e) {
    if (first) {
      append_utf8(out, static_cast<char32_t>(u_totitle(static_cast<UChar32>(c))));
      first = false;
    } else {
      out.append(text.substr(b, e - b));
    }
  });
  return out;
}

// Byte spans of UAX #29 words that contain letters, digits or ideographs.
// Spaces, punctuation and emoji are not words.
inline std::vector<ByteSpan> word_spans(std::string_view text) {
  thread_local std::unique_ptr<icu::BreakIterator> iter = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw Error("ICU word break iterator unavailable");
    return it;
  }();

  // utf16 index -> utf8 byte offset, including the end position.
  std::vector<std::size_t> byte_at;
  byte_at.reserve(text.size() + 1);
  for_each_codepoint(text, [&](char32_t c, std::size_t b, std::size_t) {
    byte_at.push_back(b);
    if (c > 0xFFFF) byte_at.push_back(b);
  });
  byte_at.push_back(text.size());

  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  iter->setText(u);

  std::vector<ByteSpan> out;
  int32_t start = iter->first();
  for (int32_t end = iter->next(); end != icu::BreakIterator::DONE;
       start = end, end = iter->next()) {
    if (iter->getRuleStatus() == UBRK_WORD_NONE) continue;
    if (static_cast<std::size_t>(end) >= byte_at.size()) break;
    out.push_back({byte_at[static_cast<std::size_t>(start)],
                   byte_at[static_cast<std::size_t>(end)]});
  }
  return out;
}

}  // namespace nlirobust::unicode
