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
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "nlirobust/corpus.hpp"
#include "nlirobust/lexicon.hpp"
#include "nlirobust/transforms.hpp"

namespace nlirobust {

// Expands every informal phrase to its canonical formal source.
inline std::string invert_slang(std::string_view text, const SlangLexicon& lexicon) {
  std::vector<detail::Edit> edits;
  for (const PhraseMatch& m : lexicon.backward().find_all(text)) {
    const auto matched = text.substr(m.span.begin, m.span.size());
    edits.push_back({m.span,
                     detail::match_casing(matched, lexicon.inverse_entry(m.entry).formal),
                     ReplacementKind::kSlang});
  }
  return detail::apply_edits(text, edits).text;
}

struct EmojiInversion {
  std::string text;
  std::size_t replaced = 0;
  // Emoji with no canonical label; left in place.
  std::size_t unknown = 0;
};

namespace detail {

inline bool is_emoji_modifier(char32_t c) {
  return c == 0x200D || c == 0xFE0F || c == 0xFE0E || (c >= 0x1F3FB && c <= 0x1F3FF);
}

struct Codepoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

}  // namespace detail

// Replaces each known emoji with its canonical label. Unknown emoji clusters
// pass through and are counted.
inline EmojiInversion invert_emoji_counted(std::string_view text,
                                           const EmojiLexicon& lexicon) {
  std::vector<detail::Codepoint> cps;
  unicode::for_each_codepoint(text, [&](char32_t c, std::size_t b, std::size_t e) {
    cps.push_back({c, b, e});
  });

  EmojiInversion out;
  std::size_t i = 0;
  while (i < cps.size()) {
    const auto& cp = cps[i];
    if (!unicode::is_emoji(cp.value)) {
      out.text.append(text.substr(cp.begin, cp.end - cp.begin));
      ++i;
      continue;
    }
    // Longest known key starting here, on codepoint boundaries.
    const std::string* label = nullptr;
    std::size_t key_end = i;
    for (std::size_t j = i; j < cps.size(); ++j) {
      const std::size_t len = cps[j].end - cp.begin;
      if (len > lexicon.max_emoji_bytes()) break;
      if (const std::string* l = lexicon.label_for(text.substr(cp.begin, len))) {
        label = l;
        key_end = j + 1;
      }
    }
    if (label != nullptr) {
      // A trailing presentation selector belongs to the emoji.
      while (key_end < cps.size() && cps[key_end].value == 0xFE0F) ++key_end;
      out.text += *label;
      ++out.replaced;
    } else {
      // Unknown cluster: the emoji plus any joiners, selectors and modifiers.
      key_end = i + 1;
      while (key_end < cps.size() &&
             (detail::is_emoji_modifier(cps[key_end].value) ||
              (cps[key_end - 1].value == 0x200D && unicode::is_emoji(cps[key_end].value)))) {
        ++key_end;
      }
      out.text.append(text.substr(cp.begin, cps[key_end - 1].end - cp.begin));
      ++out.unknown;
    }
    i = key_end;
  }
  return out;
}

inline std::string invert_emoji(std::string_view text, const EmojiLexicon& lexicon) {
  return invert_emoji_counted(text, lexicon).text;
}

// Removal spans for every listed noise token, each widened to swallow the
// whitespace run before it (or after it, at the start of the text).
inline std::vector<unicode::ByteSpan> noise_removal_spans(std::string_view text,
                                                          const NoiseLexicon& lexicon) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  std::vector<unicode::ByteSpan> out;
  for (const PhraseMatch& m : lexicon.matcher().find_all(text)) {
    unicode::ByteSpan s = m.span;
    const std::size_t floor = out.empty() ? 0 : out.back().end;
    if (s.begin > floor && is_space(text[s.begin - 1])) {
      while (s.begin > floor && is_space(text[s.begin - 1])) --s.begin;
    } else {
      while (s.end < text.size() && is_space(text[s.end])) ++s.end;
    }
    out.push_back(s);
  }
  return out;
}

// Deletes every noise token (case-insensitive, multi-word tokens as
// phrases). Deleting a token together with its leading whitespace leaves any
// trailing punctuation attached to the preceding word. Repeats until no
// token remains, so deletions that bring a token's words together are
// caught too.
inline std::string strip_noise(std::string_view hypothesis, const NoiseLexicon& lexicon) {
  std::string text(hypothesis);
  while (true) {
    const auto spans = noise_removal_spans(text, lexicon);
    if (spans.empty()) return text;
    std::string next;
    std::size_t cursor = 0;
    for (const auto& s : spans) {
      next.append(text, cursor, s.begin - cursor);
      cursor = s.end;
    }
    next.append(text, cursor);
    text = std::move(next);
  }
}

// Inference-time normalisation: strip_noise (hypothesis only), then
// invert_emoji, then invert_slang.
inline NliExample preprocess(const NliExample& example, const Lexicons& lex) {
  NliExample out = example;
  out.premise = invert_slang(invert_emoji(example.premise, lex.emoji), lex.slang);
  out.hypothesis = invert_slang(
      invert_emoji(strip_noise(example.hypothesis, lex.noise), lex.emoji), lex.slang);
  return out;
}

// Restores the given replacement kinds in one field using the trace.
// Noise insertions are removed along with the space inserted before them.
inline std::string undo_replacements(std::string_view text,
                                     const std::vector<Replacement>& replacements,
                                     Field field,
                                     std::initializer_list<ReplacementKind> kinds) {
  std::vector<const Replacement*> picked;
  for (const auto& r : replacements) {
    if (r.field == field &&
        std::find(kinds.begin(), kinds.end(), r.kind) != kinds.end()) {
      picked.push_back(&r);
    }
  }
  std::sort(picked.begin(), picked.end(), [](const Replacement* a, const Replacement* b) {
    return a->span_start > b->span_start;
  });
  std::string out(text);
  for (const Replacement* r : picked) {
    std::size_t begin = r->span_start;
    std::size_t end = r->span_end;
    if (r->kind == ReplacementKind::kNoise) {
      if (begin > 0 && out[begin - 1] == ' ') {
        --begin;
      } else if (end < out.size() && out[end] == ' ') {
        ++end;
      }
    }
    if (end > out.size() || begin > end) {
      throw AlignmentError("trace span out of range for this text");
    }
    out.replace(begin, end - begin, r->original_text);
  }
  return out;
}

struct RoundtripMetrics {
  double slang_exact = 1.0;
  double emoji_exact = 1.0;
  double noise_recall = 1.0;
  // Denominators: examples with slang rewrites, emoji replacements, noise
  // insertions. A zero denominator reports a rate of 1.0.
  std::size_t slang_examples = 0;
  std::size_t emoji_replacements = 0;
  std::size_t noise_insertions = 0;
  std::size_t slang_exact_count = 0;
  std::size_t emoji_exact_count = 0;
  std::size_t noise_removed_count = 0;
};

// True when the emoji replacement inverts back to its source word.
inline bool emoji_recovers_exactly(const Replacement& r, const EmojiLexicon& lex) {
  const std::string* label = lex.label_for(r.replacement_text);
  return label != nullptr && unicode::fold_case(*label) == unicode::fold_case(r.original_text);
}

// Round-trips each example through its transform and the inverse.
//  slang_exact: examples whose slang rewrites all invert to the original
//               text (other kinds restored from the trace first).
//  emoji_exact: emoji replacements whose canonical label equals the source
//               word.
//  noise_recall: injected noise tokens that strip_noise deletes.
inline RoundtripMetrics roundtrip_metrics(const std::vector<NliExample>& original,
                                          const std::vector<NliExample>& variant,
                                          const std::vector<TransformTrace>& traces,
                                          const Lexicons& lex) {
  if (original.size() != variant.size() || original.size() != traces.size()) {
    throw AlignmentError("original, variant and trace counts differ: " +
                         std::to_string(original.size()) + ", " +
                         std::to_string(variant.size()) + ", " +
                         std::to_string(traces.size()));
  }
  RoundtripMetrics m;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const auto& o = original[i];
    const auto& v = variant[i];
    const auto& t = traces[i];
    if (o.id != v.id || o.id != t.example_id) {
      throw AlignmentError({o.id}, {v.id}, "position " + std::to_string(i));
    }

    if (t.count(ReplacementKind::kSlang) > 0) {
      ++m.slang_examples;
      const auto others = {ReplacementKind::kEmoji, ReplacementKind::kNoise};
      const std::string p =
          undo_replacements(v.premise, t.replacements, Field::kPremise, others);
      const std::string h =
          undo_replacements(v.hypothesis, t.replacements, Field::kHypothesis, others);
      if (invert_slang(p, lex.slang) == o.premise &&
          invert_slang(h, lex.slang) == o.hypothesis) {
        ++m.slang_exact_count;
      }
    }

    std::vector<unicode::ByteSpan> removed;
    bool removed_computed = false;
    for (const auto& r : t.replacements) {
      if (r.kind == ReplacementKind::kEmoji) {
        ++m.emoji_replacements;
        m.emoji_exact_count += emoji_recovers_exactly(r, lex.emoji);
      } else if (r.kind == ReplacementKind::kNoise) {
        ++m.noise_insertions;
        if (!removed_computed) {
          removed = noise_removal_spans(v.hypothesis, lex.noise);
          removed_computed = true;
        }
        const bool hit = std::any_of(removed.begin(), removed.end(), [&](const auto& s) {
          return s.begin <= r.span_start && r.span_end <= s.end;
        });
        m.noise_removed_count += hit;
      }
    }
  }
  auto rate = [](std::size_t hit, std::size_t n) {
    return n == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(n);
  };
  m.slang_exact = rate(m.slang_exact_count, m.slang_examples);
  m.emoji_exact = rate(m.emoji_exact_count, m.emoji_replacements);
  m.noise_recall = rate(m.noise_removed_count, m.noise_insertions);
  return m;
}

}  // namespace nlirobust
