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

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "nlirobust/augment.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

namespace nlirobust {
namespace {

using testing::engine;

TEST(AugmentTest, EmptyInput) {
  EXPECT_TRUE(augment_dataset({}, 42, engine()).empty());
}

TEST(AugmentTest, OriginalsArePrefix) {
  const auto corpus = testing::synthetic_corpus(2000, 7);
  const auto out = augment_dataset(corpus, 42, engine());
  ASSERT_GE(out.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(out[i], corpus[i]);
    EXPECT_FALSE(out[i].source_id.has_value());
  }
}

TEST(AugmentTest, CopiesFollowSourceOrderAndKeepLabels) {
  const auto corpus = testing::synthetic_corpus(2000, 8);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < corpus.size(); ++i) pos[corpus[i].id] = i;
  const auto out = augment_dataset(corpus, 42, engine());
  std::size_t last = 0;
  for (std::size_t i = corpus.size(); i < out.size(); ++i) {
    const auto& c = out[i];
    ASSERT_TRUE(c.source_id && c.transform);
    const std::size_t src = pos.at(*c.source_id);
    EXPECT_GE(src, last);
    last = src;
    EXPECT_EQ(c.gold_label, corpus[src].gold_label);
    EXPECT_EQ(c.id, c.content_id());
  }
}

TEST(AugmentTest, SizeNearOneAndAHalf) {
  const std::size_t n = 20000;
  const auto out = augment_dataset(testing::synthetic_corpus(n, 9), 42, engine());
  const double expected = 1.5 * n;
  EXPECT_LE(std::abs(static_cast<double>(out.size()) - expected), 3.0 * std::sqrt(n * 0.25));
}

TEST(AugmentTest, TransformChoiceUniform) {
  const std::size_t n = 20000;
  const auto corpus = testing::synthetic_corpus(n, 10);
  const auto out = augment_dataset(corpus, 3, engine());
  std::map<std::string, double> counts;
  for (std::size_t i = n; i < out.size(); ++i) counts[*out[i].transform] += 1;
  ASSERT_EQ(counts.size(), 4u);
  const double copies = static_cast<double>(out.size() - n);
  const double sigma = std::sqrt(copies * 0.25 * 0.75);
  for (const auto& [name, c] : counts) {
    EXPECT_LE(std::abs(c - copies / 4), 3 * sigma) << name;
  }
  for (const auto& name : {"slang", "emoji", "noise", "combined"}) EXPECT_TRUE(counts.count(name));
}

TEST(AugmentTest, Deterministic) {
  const auto corpus = testing::synthetic_corpus(3000, 11);
  const auto a = augment_dataset(corpus, 42, engine(), 1);
  const auto b = augment_dataset(corpus, 42, engine(), 4);
  EXPECT_EQ(a, b);
  const auto c = augment_dataset(corpus, 43, engine(), 1);
  EXPECT_NE(a, c);
}

TEST(AugmentTest, CopyDecisionDependsOnlyOnSeedAndId) {
  const auto corpus = testing::synthetic_corpus(500, 12);
  std::vector<NliExample> reversed(corpus.rbegin(), corpus.rend());
  std::map<std::string, std::string> fwd, rev;
  const auto a = augment_dataset(corpus, 5, engine());
  const auto b = augment_dataset(reversed, 5, engine());
  for (std::size_t i = corpus.size(); i < a.size(); ++i) fwd[*a[i].source_id] = a[i].id;
  for (std::size_t i = corpus.size(); i < b.size(); ++i) rev[*b[i].source_id] = b[i].id;
  EXPECT_EQ(fwd, rev);
}

TEST(AugmentTest, NoiseCopiesAlwaysDiffer) {
  const auto corpus = testing::synthetic_corpus(2000, 13);
  const auto out = augment_dataset(corpus, 42, engine());
  std::map<std::string, const NliExample*> src;
  for (const auto& e : corpus) src[e.id] = &e;
  std::size_t noop = 0;
  for (std::size_t i = corpus.size(); i < out.size(); ++i) {
    const auto& c = out[i];
    const auto& s = *src.at(*c.source_id);
    const bool same = c.premise == s.premise && c.hypothesis == s.hypothesis;
    if (*c.transform == "noise" || *c.transform == "combined") {
      EXPECT_FALSE(same);
    } else if (same) {
      // Kept as an exact duplicate, so it carries its source's id.
      EXPECT_EQ(c.id, s.id);
      ++noop;
    }
  }
  EXPECT_GT(noop, 0u);
}

TEST(AugmentTest, JsonlKeepsProvenance) {
  const auto out = augment_dataset(testing::synthetic_corpus(50, 14), 1, engine());
  std::istringstream in(serialize_jsonl(out));
  EXPECT_EQ(parse_dataset(in).examples, out);
}

}  // namespace
}  // namespace nlirobust
