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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlirobust/corpus.hpp"
#include "nlirobust/lexicon.hpp"
#include "nlirobust/rng.hpp"

namespace nlirobust {

enum class Variant { kOriginal, kSlang, kEmoji, kNoise, kCombined };

inline constexpr std::array<Variant, 5> kVariants = {
    Variant::kOriginal, Variant::kSlang, Variant::kEmoji, Variant::kNoise,
    Variant::kCombined};

inline constexpr std::array<Variant, 4> kTransformVariants = {
    Variant::kSlang, Variant::kEmoji, Variant::kNoise, Variant::kCombined};

inline constexpr std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kOriginal:
      return "original";
    case Variant::kSlang:
      return "slang";
    case Variant::kEmoji:
      return "emoji";
    case Variant::kNoise:
      return "noise";
    case Variant::kCombined:
      return "combined";
  }
  return "";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  for (Variant v : kVariants) {
    if (variant_name(v) == s) return v;
  }
  return std::nullopt;
}

enum class ReplacementKind { kSlang, kEmoji, kNoise };

inline constexpr std::string_view kind_name(ReplacementKind k) {
  switch (k) {
    case ReplacementKind::kSlang:
      return "slang";
    case ReplacementKind::kEmoji:
      return "emoji";
    case ReplacementKind::kNoise:
      return "noise";
  }
  return "";
}

enum class Field { kPremise, kHypothesis };

inline constexpr std::string_view field_name(Field f) {
  return f == Field::kPremise ? "premise" : "hypothesis";
}

// One rewritten span. Offsets are UTF-8 byte offsets into the transformed
// field. A noise insertion has an empty original_text.
struct Replacement {
  Field field = Field::kPremise;
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::string original_text;
  std::string replacement_text;
  ReplacementKind kind = ReplacementKind::kSlang;

  friend bool operator==(const Replacement&, const Replacement&) = default;
};

struct TransformTrace {
  std::string example_id;
  std::string variant_name;
  std::vector<Replacement> replacements;
  std::size_t words_replaced_count = 0;

  std::size_t count(ReplacementKind k) const {
    return static_cast<std::size_t>(
        std::count_if(replacements.begin(), replacements.end(),
                      [k](const Replacement& r) { return r.kind == k; }));
  }

  friend bool operator==(const TransformTrace&, const TransformTrace&) = default;
};

// Spans of one field's rewrite, in output coordinates.
struct Rewrite {
  std::string text;
  std::vector<Replacement> replacements;
};

namespace detail {

struct Edit {
  unicode::ByteSpan source;
  std::string replacement;
  ReplacementKind kind;
};

// Applies sorted, non-overlapping edits and reports spans in output offsets.
inline Rewrite apply_edits(std::string_view text, const std::vector<Edit>& edits) {
  Rewrite out;
  std::size_t cursor = 0;
  for (const Edit& e : edits) {
    out.text.append(text.substr(cursor, e.source.begin - cursor));
    const std::size_t start = out.text.size();
    out.text += e.replacement;
    Replacement r;
    r.span_start = start;
    r.span_end = out.text.size();
    r.original_text = std::string(text.substr(e.source.begin, e.source.size()));
    r.replacement_text = e.replacement;
    r.kind = e.kind;
    out.replacements.push_back(std::move(r));
    cursor = e.source.end;
  }
  out.text.append(text.substr(cursor));
  return out;
}

// Maps an offset in the pre-edit text to the post-edit text. Offsets inside
// an edited span are not expected.
inline std::size_t shift_offset(std::size_t pos, const std::vector<Edit>& edits) {
  std::ptrdiff_t delta = 0;
  for (const Edit& e : edits) {
    if (e.source.end <= pos) {
      delta += static_cast<std::ptrdiff_t>(e.replacement.size()) -
               static_cast<std::ptrdiff_t>(e.source.size());
    }
  }
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pos) + delta);
}

inline bool overlaps(const unicode::ByteSpan& a, std::size_t b_begin,
                     std::size_t b_end) {
  return a.begin < b_end && b_begin < a.end;
}

}  // namespace detail

// Replaces every formal phrase with its informal form. Replacements inherit
// the initial capital of the matched span.
inline Rewrite apply_slang(std::string_view text, const SlangLexicon& lexicon) {
  std::vector<detail::Edit> edits;
  for (const PhraseMatch& m : lexicon.forward().find_all(text)) {
    const auto matched = text.substr(m.span.begin, m.span.size());
    edits.push_back({m.span,
                     detail::match_casing(matched, lexicon.entries()[m.entry].informal),
                     ReplacementKind::kSlang});
  }
  return detail::apply_edits(text, edits);
}

namespace detail {

inline std::vector<Edit> emoji_edits(std::string_view text,
                                     const EmojiLexicon& lexicon,
                                     const std::vector<Replacement>& protect) {
  std::vector<Edit> edits;
  for (const PhraseMatch& m : lexicon.matcher().find_all(text)) {
    const bool blocked =
        std::any_of(protect.begin(), protect.end(), [&](const Replacement& r) {
          return overlaps(m.span, r.span_start, r.span_end);
        });
    if (!blocked) {
      edits.push_back({m.span, lexicon.emoji_for(m.entry), ReplacementKind::kEmoji});
    }
  }
  return edits;
}

}  // namespace detail

// Replaces every whole-word occurrence of a mapped content word by its emoji.
inline Rewrite apply_emoji(std::string_view text, const EmojiLexicon& lexicon) {
  return detail::apply_edits(text, detail::emoji_edits(text, lexicon, {}));
}

// Inserts `token` at the end of a hypothesis, ahead of any trailing run of
// sentence-final punctuation and trailing whitespace.
inline Rewrite insert_noise(std::string_view hypothesis, std::string_view token) {
  std::size_t end = hypothesis.size();
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  auto is_final = [](char c) { return c == '.' || c == '!' || c == '?'; };
  while (end > 0 && is_space(hypothesis[end - 1])) --end;
  while (end > 0 && is_final(hypothesis[end - 1])) --end;
  std::size_t core = end;
  while (core > 0 && is_space(hypothesis[core - 1])) --core;

  Rewrite out;
  Replacement r;
  r.kind = ReplacementKind::kNoise;
  r.replacement_text = std::string(token);
  if (core == 0) {
    out.text = std::string(token) + " " + std::string(hypothesis);
    r.span_start = 0;
  } else {
    out.text = std::string(hypothesis.substr(0, core)) + " " + std::string(token) +
               std::string(hypothesis.substr(core));
    r.span_start = core + 1;
  }
  r.span_end = r.span_start + token.size();
  r.field = Field::kHypothesis;
  out.replacements.push_back(std::move(r));
  return out;
}

struct NoiseResult {
  std::string premise;
  std::string hypothesis;
  Replacement replacement;
};

// Appends one uniformly drawn noise token to the hypothesis. The premise is
// returned unchanged.
inline NoiseResult apply_noise(std::string_view premise, std::string_view hypothesis,
                               const NoiseLexicon& lexicon, SplitMix64& rng) {
  const auto& tokens = lexicon.tokens();
  const std::string& token = tokens[rng.below(tokens.size())];
  Rewrite rw = insert_noise(hypothesis, token);
  return {std::string(premise), std::move(rw.text), std::move(rw.replacements.front())};
}

namespace detail {

inline void tag_field(std::vector<Replacement>& rs, Field f) {
  for (auto& r : rs) r.field = f;
}

// Slang then emoji on one field; emoji never rewrites inside a slang span.
inline Rewrite slang_then_emoji(std::string_view text, const Lexicons& lex) {
  Rewrite slang = apply_slang(text, lex.slang);
  const auto edits = emoji_edits(slang.text, lex.emoji, slang.replacements);
  Rewrite emoji = apply_edits(slang.text, edits);
  for (auto& r : slang.replacements) {
    const std::size_t len = r.span_end - r.span_start;
    r.span_start = shift_offset(r.span_start, edits);
    r.span_end = r.span_start + len;
  }
  std::vector<Replacement> all = std::move(slang.replacements);
  all.insert(all.end(), emoji.replacements.begin(), emoji.replacements.end());
  std::sort(all.begin(), all.end(), [](const Replacement& a, const Replacement& b) {
    return a.span_start < b.span_start;
  });
  return {std::move(emoji.text), std::move(all)};
}

inline void finish_trace(TransformTrace& trace) {
  trace.words_replaced_count = trace.count(ReplacementKind::kSlang) +
                               trace.count(ReplacementKind::kEmoji);
  std::stable_sort(trace.replacements.begin(), trace.replacements.end(),
                   [](const Replacement& a, const Replacement& b) {
                     if (a.field != b.field) return a.field < b.field;
                     return a.span_start < b.span_start;
                   });
}

}  // namespace detail

struct TransformOutput {
  NliExample example;
  TransformTrace trace;
};

// Slang, then emoji, then noise. The fixed order keeps multi-word slang
// phrases intact before emoji substitution runs.
inline TransformOutput apply_combined(const NliExample& example, const Lexicons& lex,
                                      SplitMix64& rng) {
  TransformOutput out{example, {example.id, std::string(variant_name(Variant::kCombined)), {}, 0}};
  Rewrite p = detail::slang_then_emoji(example.premise, lex);
  Rewrite h = detail::slang_then_emoji(example.hypothesis, lex);
  detail::tag_field(p.replacements, Field::kPremise);
  detail::tag_field(h.replacements, Field::kHypothesis);

  NoiseResult noise = apply_noise(p.text, h.text, lex.noise, rng);
  // Insertion shifts any hypothesis span at or after the insertion point.
  const std::size_t inserted = noise.hypothesis.size() - h.text.size();
  const std::size_t at = noise.replacement.span_start;
  for (auto& r : h.replacements) {
    if (r.span_start >= (at == 0 ? 0 : at - 1)) {
      r.span_start += inserted;
      r.span_end += inserted;
    }
  }

  out.example.premise = std::move(p.text);
  out.example.hypothesis = std::move(noise.hypothesis);
  auto& reps = out.trace.replacements;
  reps = std::move(p.replacements);
  reps.insert(reps.end(), h.replacements.begin(), h.replacements.end());
  reps.push_back(std::move(noise.replacement));
  detail::finish_trace(out.trace);
  return out;
}

// Applies one variant's transform to an example. The transformed example
// keeps the source id so every variant stays paired by position and id.
// Randomness is drawn from derive_seed(dataset_seed, id, variant).
class TransformEngine {
 public:
  explicit TransformEngine(Lexicons lexicons) : lex_(std::move(lexicons)) {}

  const Lexicons& lexicons() const { return lex_; }

  TransformOutput apply(const NliExample& example, Variant variant,
                        std::uint64_t dataset_seed) const {
    const std::string_view name = variant_name(variant);
    SplitMix64 rng(derive_seed(dataset_seed, example.id, name));
    return apply_with(example, variant, rng);
  }

  // Same as apply() but with a caller-owned generator.
  TransformOutput apply_with(const NliExample& example, Variant variant,
                             SplitMix64& rng) const {
    TransformOutput out{example, {example.id, std::string(variant_name(variant)), {}, 0}};
    auto field_rewrite = [&](auto&& fn) {
      Rewrite p = fn(example.premise);
      Rewrite h = fn(example.hypothesis);
      detail::tag_field(p.replacements, Field::kPremise);
      detail::tag_field(h.replacements, Field::kHypothesis);
      out.example.premise = std::move(p.text);
      out.example.hypothesis = std::move(h.text);
      out.trace.replacements = std::move(p.replacements);
      out.trace.replacements.insert(out.trace.replacements.end(),
                                    h.replacements.begin(), h.replacements.end());
    };
    switch (variant) {
      case Variant::kOriginal:
        break;
      case Variant::kSlang:
        field_rewrite([&](std::string_view t) { return apply_slang(t, lex_.slang); });
        break;
      case Variant::kEmoji:
        field_rewrite([&](std::string_view t) { return apply_emoji(t, lex_.emoji); });
        break;
      case Variant::kNoise: {
        NoiseResult n = apply_noise(example.premise, example.hypothesis, lex_.noise, rng);
        out.example.hypothesis = std::move(n.hypothesis);
        out.trace.replacements.push_back(std::move(n.replacement));
        break;
      }
      case Variant::kCombined:
        return apply_combined(example, lex_, rng);
    }
    detail::finish_trace(out.trace);
    return out;
  }

 private:
  Lexicons lex_;
};

}  // namespace nlirobust
