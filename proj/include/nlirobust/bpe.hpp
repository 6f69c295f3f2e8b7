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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlirobust/corpus.hpp"
#include "nlirobust/error.hpp"
#include "nlirobust/unicode.hpp"

namespace nlirobust {

// The GPT-2 reversible byte -> printable codepoint table: printable Latin-1
// bytes map to themselves, the other 68 bytes to U+0100 onwards.
inline std::array<char32_t, 256> bytes_to_unicode() {
  std::array<char32_t, 256> table{};
  std::array<bool, 256> direct{};
  for (int b = '!'; b <= '~'; ++b) direct[static_cast<std::size_t>(b)] = true;
  for (int b = 0xA1; b <= 0xAC; ++b) direct[static_cast<std::size_t>(b)] = true;
  for (int b = 0xAE; b <= 0xFF; ++b) direct[static_cast<std::size_t>(b)] = true;
  char32_t next = 256;
  for (std::size_t b = 0; b < 256; ++b) {
    table[b] = direct[b] ? static_cast<char32_t>(b) : next++;
  }
  return table;
}

// GPT-2 pre-tokenisation, equivalent to the pattern
//   's|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+
// Pieces partition the input exactly.
inline std::vector<std::string> gpt2_pretokenize(std::string_view text) {
  struct Cp {
    char32_t c;
    std::size_t b;
  };
  std::vector<Cp> cps;
  unicode::for_each_codepoint(text, [&](char32_t c, std::size_t b, std::size_t) {
    cps.push_back({c, b});
  });
  const std::size_t n = cps.size();
  auto byte_at = [&](std::size_t i) { return i < n ? cps[i].b : text.size(); };
  auto is_ws = [&](std::size_t i) { return unicode::is_whitespace(cps[i].c); };
  auto is_l = [&](std::size_t i) { return unicode::is_letter(cps[i].c); };
  auto is_n = [&](std::size_t i) { return unicode::is_number(cps[i].c); };
  auto is_other = [&](std::size_t i) { return !is_ws(i) && !is_l(i) && !is_n(i); };

  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    if (cps[i].c == U'\'' && i + 1 < n) {
      const char32_t a = cps[i + 1].c;
      const char32_t b = i + 2 < n ? cps[i + 2].c : 0;
      if (a == U's' || a == U't' || a == U'm' || a == U'd') {
        j = i + 2;
      } else if ((a == U'r' && b == U'e') || (a == U'v' && b == U'e') ||
                 (a == U'l' && b == U'l')) {
        j = i + 3;
      }
    }
    if (j == i) {
      const std::size_t k = (cps[i].c == U' ' && i + 1 < n) ? i + 1 : i;
      if (is_l(k)) {
        j = k;
        while (j < n && is_l(j)) ++j;
      } else if (is_n(k)) {
        j = k;
        while (j < n && is_n(j)) ++j;
      } else if (is_other(k)) {
        j = k;
        while (j < n && is_other(j)) ++j;
      }
    }
    if (j == i) {
      // Whitespace run; leave its last character to prefix the next piece.
      j = i;
      while (j < n && is_ws(j)) ++j;
      if (j < n && j - i > 1) --j;
    }
    out.emplace_back(text.substr(byte_at(i), byte_at(j) - byte_at(i)));
    i = j;
  }
  return out;
}

// Byte-level BPE vocabulary: token -> id map plus ordered merges.
class BpeVocab {
 public:
  BpeVocab(std::unordered_map<std::string, std::int64_t> token_to_id,
           std::vector<std::pair<std::string, std::string>> merges)
      : token_to_id_(std::move(token_to_id)), merges_(std::move(merges)) {
    const auto table = bytes_to_unicode();
    std::unordered_set<std::string> known;
    for (std::size_t b = 0; b < 256; ++b) {
      byte_unit_[b] = unicode::to_utf8(table[b]);
      unit_to_byte_.emplace(byte_unit_[b], static_cast<std::uint8_t>(b));
      known.insert(byte_unit_[b]);
      if (!token_to_id_.contains(byte_unit_[b])) {
        throw Error("BPE vocabulary is missing a byte unit");
      }
    }
    if (token_to_id_.contains("[UNK]") || token_to_id_.contains("<unk>")) {
      throw Error("byte-level BPE vocabulary must not define an unknown token");
    }
    ranks_.reserve(merges_.size());
    for (std::size_t r = 0; r < merges_.size(); ++r) {
      const auto& [a, b] = merges_[r];
      if (!known.contains(a) || !known.contains(b)) {
        throw Error("BPE merge " + std::to_string(r) + " uses a part not produced earlier");
      }
      known.insert(a + b);
      ranks_.emplace(pair_key(a, b), r);
    }
    for (const auto& [token, id] : token_to_id_) {
      if (id >= 0) {
        if (static_cast<std::size_t>(id) >= id_to_token_.size()) {
          id_to_token_.resize(static_cast<std::size_t>(id) + 1);
        }
        id_to_token_[static_cast<std::size_t>(id)] = token;
      }
    }
  }

  // vocab.json maps token -> id; merges.txt lists "left right" per line,
  // optionally after a "#version" header.
  static BpeVocab load(const std::filesystem::path& vocab_json,
                       const std::filesystem::path& merges_txt) {
    std::unordered_map<std::string, std::int64_t> vocab;
    try {
      const auto j = nlohmann::json::parse(read_text_file(vocab_json));
      for (auto it = j.begin(); it != j.end(); ++it) {
        vocab.emplace(it.key(), it.value().get<std::int64_t>());
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error("cannot parse " + vocab_json.string() + ": " + ex.what());
    }
    std::ifstream in(merges_txt, std::ios::binary);
    if (!in) throw IoError("cannot open " + merges_txt.string());
    std::vector<std::pair<std::string, std::string>> merges;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.rfind("#version", 0) == 0) continue;
      const auto sp = line.find(' ');
      if (sp == std::string::npos || sp == 0 || sp + 1 == line.size()) {
        throw Error("malformed merge line '" + line + "'");
      }
      merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    return BpeVocab(std::move(vocab), std::move(merges));
  }

  std::size_t rank(const std::string& a, const std::string& b) const {
    auto it = ranks_.find(pair_key(a, b));
    return it == ranks_.end() ? std::numeric_limits<std::size_t>::max() : it->second;
  }

  bool contains(const std::string& token) const { return token_to_id_.contains(token); }
  std::int64_t id(const std::string& token) const { return token_to_id_.at(token); }
  const std::string& byte_unit(std::uint8_t b) const { return byte_unit_[b]; }
  const std::unordered_map<std::string, std::uint8_t>& unit_to_byte() const {
    return unit_to_byte_;
  }
  std::size_t size() const { return token_to_id_.size(); }
  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }

 private:
  static std::string pair_key(const std::string& a, const std::string& b) {
    std::string k;
    k.reserve(a.size() + b.size() + 1);
    k += a;
    k += ' ';
    k += b;
    return k;
  }

  std::unordered_map<std::string, std::int64_t> token_to_id_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<std::string, std::size_t> ranks_;
  std::array<std::string, 256> byte_unit_;
  std::unordered_map<std::string, std::uint8_t> unit_to_byte_;
  std::vector<std::string> id_to_token_;
};

// Merges one pre-token's byte units, lowest-ranked pair first.
inline std::vector<std::string> bpe_merge_word(std::string_view piece, const BpeVocab& vocab) {
  std::vector<std::string> symbols;
  symbols.reserve(piece.size());
  for (char c : piece) symbols.push_back(vocab.byte_unit(static_cast<std::uint8_t>(c)));

  while (symbols.size() > 1) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      const std::size_t r = vocab.rank(symbols[i], symbols[i + 1]);
      if (r < best) {
        best = r;
        best_at = i;
      }
    }
    if (best == std::numeric_limits<std::size_t>::max()) break;
    const std::string left = symbols[best_at];
    const std::string right = symbols[best_at + 1];
    std::vector<std::string> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
        merged.push_back(left + right);
        i += 2;
      } else {
        merged.push_back(symbols[i]);
        ++i;
      }
    }
    symbols = std::move(merged);
  }
  return symbols;
}

// Encodes text into byte-level BPE tokens. Every output token is in the
// vocabulary; there is no unknown token.
inline std::vector<std::string> bpe_tokenize(std::string_view text, const BpeVocab& vocab) {
  std::vector<std::string> out;
  for (const auto& piece : gpt2_pretokenize(text)) {
    auto symbols = bpe_merge_word(piece, vocab);
    out.insert(out.end(), std::make_move_iterator(symbols.begin()),
               std::make_move_iterator(symbols.end()));
  }
  return out;
}

// Inverse of bpe_tokenize: concatenates the tokens and maps units to bytes.
inline std::string bpe_decode(const std::vector<std::string>& tokens, const BpeVocab& vocab) {
  std::string out;
  const auto& table = vocab.unit_to_byte();
  for (const auto& t : tokens) {
    unicode::for_each_codepoint(t, [&](char32_t, std::size_t b, std::size_t e) {
      auto it = table.find(t.substr(b, e - b));
      if (it == table.end()) throw Error("token unit is not a byte unit");
      out.push_back(static_cast<char>(it->second));
    });
  }
  return out;
}

}  // namespace nlirobust
