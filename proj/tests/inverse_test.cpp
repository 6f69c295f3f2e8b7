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

#include <gtest/gtest.h>

#include "nlirobust/inverse.hpp"
#include "nlirobust/variants.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

namespace nlirobust {
namespace {

using testing::emoji;
using testing::lexicons;

TEST(InvertSlangTest, Examples) {
  const auto& lex = lexicons().slang;
  EXPECT_EQ(invert_slang("I am gonna call my homie tomorrow.", lex),
            "I am going to call my friend tomorrow.");
  EXPECT_EQ(invert_slang("She is tryna take a pic of the dog.", lex),
            "She is trying to take a picture of the dog.");
  EXPECT_EQ(invert_slang("Nothing informal here.", lex), "Nothing informal here.");
  EXPECT_EQ(invert_slang("Gonna go, homies!", lex), "Going to go, friends!");
}

TEST(InvertSlangTest, CanonicalSourceForCollisions) {
  const auto& lex = lexicons().slang;
  EXPECT_EQ(invert_slang(apply_slang("my buddy", lex).text, lex), "my friend");
  EXPECT_EQ(invert_slang(apply_slang("my friend", lex).text, lex), "my friend");
}

TEST(InvertSlangTest, ExactOnCollisionFreeEntries) {
  const auto& lex = lexicons().slang;
  for (const auto& e : lex.entries()) {
    if (lex.informal_is_formal_key(e) || !lex.is_canonical_source(e)) continue;
    const std::string text = "We say " + e.formal + " here.";
    EXPECT_EQ(invert_slang(apply_slang(text, lex).text, lex), text) << e.formal;
  }
}

TEST(InvertEmojiTest, Examples) {
  const auto& lex = lexicons().emoji;
  EXPECT_EQ(invert_emoji(emoji("man") + " runs", lex), "man runs");
  // Many-to-one: "boy" comes back as the canonical "man".
  EXPECT_EQ(invert_emoji(apply_emoji("A boy", lex).text, lex), "A man");
  EXPECT_EQ(invert_emoji("plain text", lex), "plain text");
}

TEST(InvertEmojiTest, UnknownEmojiCounted) {
  const auto& lex = lexicons().emoji;
  const std::string unknown = "\xF0\x9F\xA6\x84";  // U+1F984, not in the lexicon
  ASSERT_EQ(lex.label_for(unknown), nullptr);
  const auto r = invert_emoji_counted("a " + unknown + " and " + emoji("dog") + "\xEF\xB8\x8F", lex);
  EXPECT_EQ(r.text, "a " + unknown + " and dog");
  EXPECT_EQ(r.unknown, 1u);
  EXPECT_EQ(r.replaced, 1u);
}

TEST(StripNoiseTest, Examples) {
  const auto& lex = lexicons().noise;
  EXPECT_EQ(strip_noise("Boys play football deadass.", lex), "Boys play football.");
  EXPECT_EQ(strip_noise("boys play football deadass", lex), "boys play football");
  EXPECT_EQ(strip_noise("Someone is near the water no cap", lex), "Someone is near the water");
  EXPECT_EQ(strip_noise("No noise here.", lex), "No noise here.");
  EXPECT_EQ(strip_noise("Tbh it rains.", lex), "it rains.");
  // Deleting the inner token brings "no" and "cap" together; that is removed too.
  EXPECT_EQ(strip_noise("no no cap cap", lex), "");
  EXPECT_EQ(strip_noise("no no cap cap", lex), strip_noise(strip_noise("no no cap cap", lex), lex));
}

TEST(StripNoiseTest, RestoresEveryInsertion) {
  for (const auto& e : testing::synthetic_corpus(300, 8)) {
    for (const auto& token : lexicons().noise.tokens()) {
      EXPECT_EQ(strip_noise(insert_noise(e.hypothesis, token).text, lexicons().noise),
                e.hypothesis);
    }
  }
}

TEST(PreprocessTest, CleanExampleUnchangedAndIdempotent) {
  const auto& lex = lexicons();
  const auto clean = NliExample::make("A statue stands.", "It is old.", Label::kNeutral);
  EXPECT_EQ(preprocess(clean, lex), clean);
  for (const auto& e : testing::synthetic_corpus(300, 4)) {
    const auto out = testing::engine().apply(e, Variant::kCombined, 42).example;
    const auto once = preprocess(out, lex);
    EXPECT_EQ(preprocess(once, lex), once);
    for (const std::string* field : {&once.premise, &once.hypothesis}) {
      EXPECT_FALSE(unicode::contains_emoji(*field)) << *field;
      EXPECT_TRUE(lex.noise.matcher().find_all(*field).empty()) << *field;
      EXPECT_TRUE(lex.slang.backward().find_all(*field).empty()) << *field;
    }
  }
}

TEST(PreprocessTest, CombinedRecoversUpToEmojiLosses) {
  const auto& lex = lexicons();
  const auto e = NliExample::make("A woman is going to take a picture of her friend.",
                                  "A woman is near the water.", Label::kNeutral);
  const auto out = testing::engine().apply(e, Variant::kCombined, 42).example;
  EXPECT_EQ(preprocess(out, lex).premise, e.premise);
  EXPECT_EQ(preprocess(out, lex).hypothesis, e.hypothesis);
}

TEST(RoundtripTest, IdenticalVariantIsVacuouslyPerfect) {
  const auto corpus = testing::synthetic_corpus(50, 1);
  const auto v = generate_variant(corpus, Variant::kOriginal, 1, testing::engine());
  const auto m = roundtrip_metrics(corpus, v.examples, v.traces, lexicons());
  EXPECT_EQ(m.slang_exact, 1.0);
  EXPECT_EQ(m.emoji_exact, 1.0);
  EXPECT_EQ(m.noise_recall, 1.0);
  EXPECT_EQ(m.slang_examples + m.emoji_replacements + m.noise_insertions, 0u);
}

TEST(RoundtripTest, RatesOnVariants) {
  const auto corpus = testing::synthetic_corpus(1000, 12);
  for (Variant v : kTransformVariants) {
    const auto data = generate_variant(corpus, v, 42, testing::engine());
    const auto m = roundtrip_metrics(corpus, data.examples, data.traces, lexicons());
    EXPECT_EQ(m.noise_recall, 1.0) << variant_name(v);
    EXPECT_GE(m.slang_exact, 0.95) << variant_name(v);
    // Brute-force recount of emoji exactness from the traces.
    std::size_t n = 0;
    std::size_t exact = 0;
    for (const auto& t : data.traces) {
      for (const auto& r : t.replacements) {
        if (r.kind != ReplacementKind::kEmoji) continue;
        ++n;
        const std::string back = invert_emoji(r.replacement_text, lexicons().emoji);
        exact += unicode::fold_case(back) == unicode::fold_case(r.original_text);
      }
    }
    EXPECT_EQ(m.emoji_replacements, n);
    EXPECT_EQ(m.emoji_exact_count, exact);
  }
}

TEST(RoundtripTest, MisalignedInputsRejected) {
  const auto corpus = testing::synthetic_corpus(10, 1);
  const auto data = generate_variant(corpus, Variant::kSlang, 1, testing::engine());
  auto shuffled = data.examples;
  std::swap(shuffled[0], shuffled[1]);
  EXPECT_THROW(roundtrip_metrics(corpus, shuffled, data.traces, lexicons()), AlignmentError);
  auto shorter = data.examples;
  shorter.pop_back();
  EXPECT_THROW(roundtrip_metrics(corpus, shorter, data.traces, lexicons()), AlignmentError);
}

}  // namespace
}  // namespace nlirobust
