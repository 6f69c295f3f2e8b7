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

#include <sstream>

#include <gtest/gtest.h>

#include "nlirobust/corpus.hpp"
#include "nlirobust/variants.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

namespace nlirobust {
namespace {

using testing::TempDir;

LoadResult parse(const std::string& body) {
  std::istringstream in(body);
  return parse_dataset(in);
}

TEST(ExampleIdTest, MatchesPythonHashlib) {
  // hashlib.sha256("\x1f".join([p, h, label]).encode()).hexdigest()[:32]
  EXPECT_EQ(example_id("A man runs.", "A person moves.", Label::kEntailment),
            "137e117ea8912f9efa21cdbba228a7c6");
  EXPECT_EQ(example_id("A person moves.", "A man runs.", Label::kEntailment),
            "a8c2711f3ba0b2a64f74de16a6f7d194");
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ExampleIdTest, DeterministicFixedWidthHex) {
  const auto a = example_id("p", "h", Label::kNeutral);
  EXPECT_EQ(a, example_id("p", "h", Label::kNeutral));
  EXPECT_TRUE(is_example_id(a));
  EXPECT_NE(a, example_id("h", "p", Label::kNeutral));
  EXPECT_NE(a, example_id("p", "h", Label::kContradiction));
  // The separator keeps the encoding injective.
  EXPECT_NE(example_id("ab", "c", Label::kNeutral), example_id("a", "bc", Label::kNeutral));
}

TEST(LoadDatasetTest, MapsFields) {
  const auto r = parse(
      R"({"premise":"A man runs.","hypothesis":"A person moves.","label":"entailment"})"
      "\n");
  ASSERT_EQ(r.examples.size(), 1u);
  const auto& e = r.examples[0];
  EXPECT_EQ(e.premise, "A man runs.");
  EXPECT_EQ(e.hypothesis, "A person moves.");
  EXPECT_EQ(e.gold_label, Label::kEntailment);
  EXPECT_EQ(e.id, e.content_id());
}

TEST(LoadDatasetTest, DropsUnannotated) {
  const auto r = parse(
      R"({"sentence1":"A.","sentence2":"B.","gold_label":"-"})"
      "\n"
      R"({"sentence1":"A.","sentence2":"B.","gold_label":"neutral"})"
      "\n");
  EXPECT_EQ(r.examples.size(), 1u);
  EXPECT_EQ(r.dropped_unlabeled, 1u);
}

TEST(LoadDatasetTest, EmptyInput) {
  const auto r = parse("");
  EXPECT_TRUE(r.examples.empty());
  EXPECT_EQ(r.dropped_unlabeled, 0u);
}

TEST(LoadDatasetTest, Errors) {
  try {
    parse("{\"premise\":\"a\",\"hypothesis\":\"b\",\"label\":\"neutral\"}\n{oops\n");
    FAIL();
  } catch (const MalformedRecord& ex) {
    EXPECT_EQ(ex.line_no(), 2u);
  }
  try {
    parse(R"({"premise":"a","hypothesis":"b","label":"maybe"})");
    FAIL();
  } catch (const UnknownLabel& ex) {
    EXPECT_EQ(ex.line_no(), 1u);
    EXPECT_EQ(ex.value(), "maybe");
  }
  EXPECT_THROW(parse(R"({"premise":"  ","hypothesis":"b","label":"neutral"})"),
               MalformedRecord);
  EXPECT_THROW(parse(R"({"premise":"a","label":"neutral"})"), MalformedRecord);
  EXPECT_THROW(load_dataset("/nonexistent/file.jsonl"), IoError);
}

TEST(LoadDatasetTest, WriteLoadRoundTrip) {
  TempDir dir;
  const auto examples = testing::synthetic_corpus(200, 7);
  write_dataset(dir / "d.jsonl", examples);
  const auto back = load_dataset(dir / "d.jsonl").examples;
  EXPECT_EQ(back, examples);
}

TEST(BuildVariantsTest, FiveAlignedFiles) {
  TempDir dir;
  const auto examples = testing::synthetic_corpus(100, 3);
  const auto m = build_eval_variants(examples, 42, testing::engine(), dir.path(), "snli");
  ASSERT_EQ(m.variants.size(), 5u);
  EXPECT_EQ(m.seed, 42u);
  for (Variant v : kVariants) {
    const VariantEntry* e = m.find(variant_name(v));
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->example_count, 100u);
    EXPECT_TRUE(std::filesystem::exists(dir / e->file_path));
    const auto loaded = load_dataset(dir / e->file_path).examples;
    for (std::size_t i = 0; i < loaded.size(); ++i) EXPECT_EQ(loaded[i].id, examples[i].id);
  }
  EXPECT_EQ(m.find("original")->content_digest, dataset_digest(examples));
  EXPECT_EQ(load_dataset(dir / "snli.original.jsonl").examples, examples);
  EXPECT_NO_THROW(validate_manifest(m, dir.path()));
  EXPECT_EQ(load_manifest(dir / "snli.manifest.json"), m);
}

TEST(BuildVariantsTest, DeterministicAcrossRunsAndJobs) {
  TempDir a;
  TempDir b;
  const auto examples = testing::synthetic_corpus(300, 11);
  const auto ma = build_eval_variants(examples, 9, testing::engine(), a.path(), "x", 1);
  const auto mb = build_eval_variants(examples, 9, testing::engine(), b.path(), "x", 4);
  EXPECT_EQ(ma, mb);
  const auto mc = build_eval_variants(examples, 10, testing::engine(), b.path(), "x", 1);
  EXPECT_NE(ma.find("noise")->content_digest, mc.find("noise")->content_digest);
  EXPECT_EQ(ma.find("slang")->content_digest, mc.find("slang")->content_digest);
}

TEST(BuildVariantsTest, EmptyInputRejected) {
  TempDir dir;
  EXPECT_THROW(build_eval_variants({}, 1, testing::engine(), dir.path(), "x"), EmptyInput);
}

TEST(BuildVariantsTest, TamperedFileDetected) {
  TempDir dir;
  const auto m = build_eval_variants(testing::synthetic_corpus(20, 1), 1, testing::engine(),
                                     dir.path(), "x");
  write_text_file(dir / "x.emoji.jsonl", read_text_file(dir / "x.original.jsonl"));
  EXPECT_THROW(validate_manifest(m, dir.path()), Error);
}

}  // namespace
}  // namespace nlirobust
