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

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nlirobust/error.hpp"
#include "nlirobust/unicode.hpp"

namespace nlirobust {

// A phrase occurrence in some text. `entry` indexes the matcher's entries.
struct PhraseMatch {
  unicode::ByteSpan span;
  std::size_t entry = 0;
};

// Case-insensitive, word-boundary phrase matcher. Phrases are sequences of
// UAX #29 words; consecutive words in the text must be separated by
// whitespace only. Matches are found left to right, longest phrase first,
// without overlap.
class PhraseMatcher {
 public:
  PhraseMatcher() = default;

  explicit PhraseMatcher(const std::vector<std::string>& phrases) {
    for (std::size_t i = 0; i < phrases.size(); ++i) add(phrases[i], i);
  }

  void add(std::string_view phrase, std::size_t entry) {
    std::vector<std::string> words;
    for (const auto& span : unicode::word_spans(phrase)) {
      words.push_back(unicode::fold_case(phrase.substr(span.begin, span.size())));
    }
    if (words.empty()) {
      throw LexiconError("phrase '" + std::string(phrase) + "' has no words");
    }
    auto& bucket = by_first_[words.front()];
    bucket.push_back({std::move(words), entry});
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const Pattern& a, const Pattern& b) {
                       return a.words.size() > b.words.size();
                     });
  }

  std::vector<PhraseMatch> find_all(std::string_view text) const {
    std::vector<PhraseMatch> out;
    if (by_first_.empty()) return out;
    const auto spans = unicode::word_spans(text);
    std::vector<std::string> folded;
    folded.reserve(spans.size());
    for (const auto& s : spans) {
      folded.push_back(unicode::fold_case(text.substr(s.begin, s.size())));
    }

    std::size_t i = 0;
    while (i < spans.size()) {
      const Pattern* hit = nullptr;
      if (auto it = by_first_.find(folded[i]); it != by_first_.end()) {
        for (const Pattern& p : it->second) {
          if (matches_at(text, spans, folded, i, p)) {
            hit = &p;
            break;
          }
        }
      }
      if (hit != nullptr) {
        const std::size_t last = i + hit->words.size() - 1;
        out.push_back({{spans[i].begin, spans[last].end}, hit->entry});
        i = last + 1;
      } else {
        ++i;
      }
    }
    return out;
  }

 private:
  struct Pattern {
    std::vector<std::string> words;
    std::size_t entry;
  };

  static bool only_whitespace(std::string_view s) {
    bool ok = !s.empty();
    unicode::for_each_codepoint(s, [&](char32_t c, std::size_t, std::size_t) {
      ok = ok && unicode::is_whitespace(c);
    });
    return ok;
  }

  static bool matches_at(std::string_view text,
                         const std::vector<unicode::ByteSpan>& spans,
                         const std::vector<std::string>& folded, std::size_t i,
                         const Pattern& p) {
    if (i + p.words.size() > spans.size()) return false;
    for (std::size_t k = 0; k < p.words.size(); ++k) {
      if (folded[i + k] != p.words[k]) return false;
      if (k > 0) {
        const auto gap_begin = spans[i + k - 1].end;
        const auto gap = text.substr(gap_begin, spans[i + k].begin - gap_begin);
        if (!only_whitespace(gap)) return false;
      }
    }
    return true;
  }

  std::unordered_map<std::string, std::vector<Pattern>> by_first_;
};

namespace detail {

// Splits a TSV data file into rows, skipping blank lines and '#' comments.
inline std::vector<std::vector<std::string>> read_tsv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon file " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(cols));
  }
  return rows;
}

inline std::string match_casing(std::string_view matched,
                                std::string_view replacement) {
  if (unicode::starts_upper(matched)) return unicode::capitalize_first(replacement);
  return std::string(replacement);
}

}  // namespace detail

struct SlangEntry {
  std::string formal;
  std::string informal;
  bool canonical = false;
};

// Formal phrase -> informal phrase table, applied in both directions.
class SlangLexicon {
 public:
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 6>
      kRequiredEntries = {{{"going to", "gonna"},
                           {"trying to", "tryna"},
                           {"picture", "pic"},
                           {"friend", "homie"},
                           {"kind of", "kinda"},
                           {"want to", "wanna"}}};

  SlangLexicon() = default;

  explicit SlangLexicon(std::vector<SlangEntry> entries)
      : entries_(std::move(entries)) {
    std::set<std::string> seen;
    std::vector<std::string> formal;
    for (const auto& e : entries_) {
      if (!seen.insert(unicode::fold_case(e.formal)).second) {
        throw LexiconError("duplicate slang key '" + e.formal + "'");
      }
      formal.push_back(e.formal);
    }
    forward_ = PhraseMatcher(formal);

    // informal -> entry used for inversion: the row marked canonical, else
    // the first row with that informal form.
    std::map<std::string, std::size_t> inverse;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto key = unicode::fold_case(entries_[i].informal);
      auto [it, inserted] = inverse.emplace(key, i);
      if (!inserted && entries_[i].canonical && !entries_[it->second].canonical) {
        it->second = i;
      }
    }
    for (const auto& [key, idx] : inverse) {
      inverse_entry_.push_back(idx);
      backward_.add(entries_[idx].informal, inverse_entry_.size() - 1);
    }
  }

  static SlangLexicon load(const std::filesystem::path& path) {
    std::vector<SlangEntry> entries;
    for (const auto& row : detail::read_tsv(path)) {
      if (row.size() < 2 || row[0].empty() || row[1].empty()) {
        throw LexiconError("slang rows need formal and informal columns in " +
                           path.string());
      }
      entries.push_back({row[0], row[1], row.size() > 2 && row[2] == "canonical"});
    }
    return SlangLexicon(std::move(entries));
  }

  const std::vector<SlangEntry>& entries() const { return entries_; }
  const PhraseMatcher& forward() const { return forward_; }
  const PhraseMatcher& backward() const { return backward_; }

  // Entry that an informal-phrase match (from backward()) inverts to.
  const SlangEntry& inverse_entry(std::size_t backward_index) const {
    return entries_[inverse_entry_[backward_index]];
  }

  // Informal phrases that are also formal keys; such entries cannot round
  // trip exactly.
  bool informal_is_formal_key(const SlangEntry& e) const {
    const auto key = unicode::fold_case(e.informal);
    return std::any_of(entries_.begin(), entries_.end(), [&](const SlangEntry& o) {
      return unicode::fold_case(o.formal) == key;
    });
  }

  // True when inverting `e.informal` yields `e.formal`.
  bool is_canonical_source(const SlangEntry& e) const {
    for (std::size_t i = 0; i < inverse_entry_.size(); ++i) {
      const auto& inv = entries_[inverse_entry_[i]];
      if (unicode::fold_case(inv.informal) == unicode::fold_case(e.informal)) {
        return &inv == &e;
      }
    }
    return false;
  }

 private:
  std::vector<SlangEntry> entries_;
  PhraseMatcher forward_;
  PhraseMatcher backward_;
  std::vector<std::size_t> inverse_entry_;
};

// Content word -> emoji, and emoji -> canonical text label.
class EmojiLexicon {
 public:
  static constexpr std::size_t kMinCategories = 60;

  EmojiLexicon() = default;

  EmojiLexicon(std::vector<std::pair<std::string, std::string>> word_to_emoji,
               std::map<std::string, std::string> emoji_to_label)
      : words_(std::move(word_to_emoji)), labels_(std::move(emoji_to_label)) {
    std::set<std::string> seen;
    std::vector<std::string> keys;
    for (const auto& [word, emoji] : words_) {
      if (!seen.insert(unicode::fold_case(word)).second) {
        throw LexiconError("duplicate emoji source word '" + word + "'");
      }
      if (!labels_.contains(emoji)) {
        throw LexiconError("emoji for '" + word + "' has no canonical label");
      }
      keys.push_back(word);
    }
    for (const auto& [emoji, label] : labels_) {
      if (emoji.empty() || label.empty()) {
        throw LexiconError("empty emoji or label in emoji lexicon");
      }
      max_emoji_bytes_ = std::max(max_emoji_bytes_, emoji.size());
    }
    matcher_ = PhraseMatcher(keys);
  }

  static EmojiLexicon load(const std::filesystem::path& words_path,
                           const std::filesystem::path& labels_path) {
    std::vector<std::pair<std::string, std::string>> words;
    for (const auto& row : detail::read_tsv(words_path)) {
      if (row.size() < 2) {
        throw LexiconError("emoji word rows need two columns in " +
                           words_path.string());
      }
      words.emplace_back(row[0], row[1]);
    }
    std::map<std::string, std::string> labels;
    for (const auto& row : detail::read_tsv(labels_path)) {
      if (row.size() < 2) {
        throw LexiconError("emoji label rows need two columns in " +
                           labels_path.string());
      }
      if (!labels.emplace(row[0], row[1]).second) {
        throw LexiconError("emoji '" + row[0] + "' has two labels");
      }
    }
    return EmojiLexicon(std::move(words), std::move(labels));
  }

  const std::vector<std::pair<std::string, std::string>>& word_to_emoji() const {
    return words_;
  }
  const std::map<std::string, std::string>& emoji_to_label() const {
    return labels_;
  }
  const PhraseMatcher& matcher() const { return matcher_; }

  const std::string& emoji_for(std::size_t entry) const {
    return words_[entry].second;
  }

  // Emoji for a source word (case-insensitive), or nullptr.
  const std::string* emoji_for_word(std::string_view word) const {
    const std::string key = unicode::fold_case(word);
    for (const auto& [w, e] : words_) {
      if (unicode::fold_case(w) == key) return &e;
    }
    return nullptr;
  }

  const std::string* label_for(std::string_view emoji) const {
    auto it = labels_.find(std::string(emoji));
    return it == labels_.end() ? nullptr : &it->second;
  }

  std::size_t category_count() const { return labels_.size(); }
  std::size_t max_emoji_bytes() const { return max_emoji_bytes_; }

 private:
  std::vector<std::pair<std::string, std::string>> words_;
  std::map<std::string, std::string> labels_;
  PhraseMatcher matcher_;
  std::size_t max_emoji_bytes_ = 0;
};

// The nine filler tokens appended by the noise transform.
class NoiseLexicon {
 public:
  static constexpr std::array<std::string_view, 9> kTokens = {
      "deadass", "lowkey", "no cap", "tbh",      "highkey",
      "on god",  "frfr",   "real talk", "bet"};

  NoiseLexicon() {
    std::vector<std::string> tokens(kTokens.begin(), kTokens.end());
    tokens_ = tokens;
    matcher_ = PhraseMatcher(tokens);
  }

  // The file must list exactly the nine tokens.
  static NoiseLexicon load(const std::filesystem::path& path) {
    std::set<std::string> listed;
    for (const auto& row : detail::read_tsv(path)) {
      if (!row.empty() && !row[0].empty()) listed.insert(row[0]);
    }
    const std::set<std::string> expected(kTokens.begin(), kTokens.end());
    if (listed != expected) {
      throw LexiconError("noise token list in " + path.string() +
                         " must be exactly the nine fixed tokens");
    }
    return NoiseLexicon();
  }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const PhraseMatcher& matcher() const { return matcher_; }

 private:
  std::vector<std::string> tokens_;
  PhraseMatcher matcher_;
};

struct Lexicons {
  SlangLexicon slang;
  EmojiLexicon emoji;
  NoiseLexicon noise;

  static Lexicons load(const std::filesystem::path& data_dir) {
    return {SlangLexicon::load(data_dir / "slang.tsv"),
            EmojiLexicon::load(data_dir / "emoji_words.tsv",
                               data_dir / "emoji_labels.tsv"),
            NoiseLexicon::load(data_dir / "noise.txt")};
  }
};

}  // namespace nlirobust
