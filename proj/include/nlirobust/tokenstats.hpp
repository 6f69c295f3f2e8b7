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
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlirobust/bpe.hpp"
#include "nlirobust/corpus.hpp"
#include "nlirobust/wordpiece.hpp"

namespace nlirobust {

// Per-variant tokenizer diagnostics. Premise and hypothesis are counted
// jointly per example. Fields not computed by a given call stay empty.
struct TokenizationStats {
  std::string variant_name;
  std::size_t n_examples = 0;
  std::optional<double> mean_unk_per_example;
  std::optional<double> pct_examples_with_unk;
  std::optional<double> mean_subwords_per_word;
};

inline std::size_t count_unk(std::string_view text, const WordPieceVocab& vocab) {
  const auto tokens = wordpiece_tokenize_text(text, vocab);
  return static_cast<std::size_t>(
      std::count(tokens.begin(), tokens.end(), WordPieceVocab::kUnk));
}

inline TokenizationStats unk_stats(const std::vector<NliExample>& dataset,
                                   const WordPieceVocab& vocab,
                                   std::string variant_name = {}) {
  if (dataset.empty()) throw EmptyInput("unk_stats needs at least one example");
  std::size_t total_unk = 0;
  std::size_t with_unk = 0;
  for (const auto& e : dataset) {
    const std::size_t n = count_unk(e.premise, vocab) + count_unk(e.hypothesis, vocab);
    total_unk += n;
    with_unk += n > 0;
  }
  TokenizationStats s;
  s.variant_name = std::move(variant_name);
  s.n_examples = dataset.size();
  s.mean_unk_per_example = static_cast<double>(total_unk) / static_cast<double>(dataset.size());
  s.pct_examples_with_unk =
      100.0 * static_cast<double>(with_unk) / static_cast<double>(dataset.size());
  return s;
}

// Subword tokens per pretokenised word for one example. Words come from
// pretokenize() without lowercasing.
inline double subwords_per_word(const NliExample& e, const BpeVocab& vocab) {
  const std::size_t words =
      pretokenize(e.premise, false).size() + pretokenize(e.hypothesis, false).size();
  const std::size_t pieces =
      bpe_tokenize(e.premise, vocab).size() + bpe_tokenize(e.hypothesis, vocab).size();
  if (words == 0) return 1.0;
  return static_cast<double>(pieces) / static_cast<double>(words);
}

// Mean over examples of the per-example subword/word ratio.
inline TokenizationStats fragmentation_stats(const std::vector<NliExample>& dataset,
                                             const BpeVocab& vocab,
                                             std::string variant_name = {}) {
  if (dataset.empty()) throw EmptyInput("fragmentation_stats needs at least one example");
  double sum = 0.0;
  for (const auto& e : dataset) sum += subwords_per_word(e, vocab);
  TokenizationStats s;
  s.variant_name = std::move(variant_name);
  s.n_examples = dataset.size();
  s.mean_subwords_per_word = sum / static_cast<double>(dataset.size());
  return s;
}

inline nlohmann::ordered_json to_json(const TokenizationStats& s) {
  nlohmann::ordered_json j;
  j["variant"] = s.variant_name;
  j["n_examples"] = s.n_examples;
  if (s.mean_unk_per_example) j["mean_unk_per_example"] = *s.mean_unk_per_example;
  if (s.pct_examples_with_unk) j["pct_examples_with_unk"] = *s.pct_examples_with_unk;
  if (s.mean_subwords_per_word) j["mean_subwords_per_word"] = *s.mean_subwords_per_word;
  return j;
}

}  // namespace nlirobust
