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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nlirobust/error.hpp"
#include "nlirobust/unicode.hpp"

namespace nlirobust {

// BERT-style basic tokenisation: drop control characters, isolate CJK and
// emoji codepoints, split on whitespace, optionally lowercase and strip
// accents, then split punctuation into standalone words.
inline std::vector<std::string> pretokenize(std::string_view text, bool lowercase) {
  std::string spaced;
  spaced.reserve(text.size() + 8);
  unicode::for_each_codepoint(text, [&](char32_t c, std::size_t b, std::size_t e) {
    if (c == 0 || c == 0xFFFD || unicode::is_control(c)) return;
    if (unicode::is_whitespace(c)) {
      spaced.push_back(' ');
    } else if (unicode::is_cjk(c) || unicode::is_emoji(c)) {
      spaced.push_back(' ');
      spaced.append(text.substr(b, e - b));
      spaced.push_back(' ');
    } else {
      spaced.append(text.substr(b, e - b));
    }
  });

  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < spaced.size()) {
    while (pos < spaced.size() && spaced[pos] == ' ') ++pos;
    const std::size_t start = pos;
    while (pos < spaced.size() && spaced[pos] != ' ') ++pos;
    if (pos == start) break;
    std::string token = spaced.substr(start, pos - start);
    if (lowercase) token = unicode::strip_accents(unicode::to_lower(token));

    std::string current;
    unicode::for_each_codepoint(token, [&](char32_t c, std::size_t b, std::size_t e) {
      if (unicode::is_punctuation(c)) {
        if (!current.empty()) words.push_back(std::move(current));
        current.clear();
        words.emplace_back(token.substr(b, e - b));
      } else {
        current.append(token, b, e - b);
      }
    });
    if (!current.empty()) words.push_back(std::move(current));
  }
  return words;
}

class WordPieceVocab {
 public:
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::size_t kDefaultMaxWordChars = 100;

  WordPieceVocab(std::vector<std::string> tokens, bool lowercase = true,
                 std::size_t max_word_chars = kDefaultMaxWordChars)
      : tokens_(std::move(tokens)),
        lowercase_(lowercase),
        max_word_chars_(max_word_chars) {
    ids_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!ids_.emplace(tokens_[i], i).second) {
        throw Error("duplicate WordPiece token '" + tokens_[i] + "'");
      }
    }
    if (!ids_.contains(std::string(kUnk))) {
      throw Error("WordPiece vocabulary has no [UNK] token");
    }
  }

  // One token per line; the line index is the token id.
  static WordPieceVocab load(const std::filesystem::path& path, bool lowercase = true,
                             std::size_t max_word_chars = kDefaultMaxWordChars) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tokens.push_back(line);
    }
    while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
    return WordPieceVocab(std::move(tokens), lowercase, max_word_chars);
  }

  bool contains(std::string_view token) const {
    return ids_.contains(std::string(token));
  }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool lowercase() const { return lowercase_; }
  std::size_t max_word_chars() const { return max_word_chars_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
  bool lowercase_;
  std::size_t max_word_chars_;
};

// Greedy longest-match-first. Non-initial pieces carry the "##" prefix. A
// word with any unmatched remainder, or longer than max_word_chars, becomes
// a single [UNK].
inline std::vector<std::string> wordpiece_tokenize(std::string_view word,
                                                   const WordPieceVocab& vocab) {
  std::vector<std::size_t> bounds;
  unicode::for_each_codepoint(word, [&](char32_t, std::size_t b, std::size_t) {
    bounds.push_back(b);
  });
  bounds.push_back(word.size());
  const std::size_t n_chars = bounds.size() - 1;
  if (n_chars == 0) return {};
  if (n_chars > vocab.max_word_chars()) return {std::string(WordPieceVocab::kUnk)};

  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::string candidate;
  while (start < n_chars) {
    std::size_t end = n_chars;
    bool found = false;
    for (; end > start; --end) {
      candidate.clear();
      if (start > 0) candidate = "##";
      candidate.append(word.substr(bounds[start], bounds[end] - bounds[start]));
      if (vocab.contains(candidate)) {
        found = true;
        break;
      }
    }
    if (!found) return {std::string(WordPieceVocab::kUnk)};
    pieces.push_back(candidate);
    start = end;
  }
  return pieces;
}

inline std::vector<std::string> wordpiece_tokenize_text(std::string_view text,
                                                        const WordPieceVocab& vocab) {
  std::vector<std::string> out;
  for (const auto& word : pretokenize(text, vocab.lowercase())) {
    auto pieces = wordpiece_tokenize(word, vocab);
    out.insert(out.end(), pieces.begin(), pieces.end());
  }
  return out;
}

}  // namespace nlirobust
