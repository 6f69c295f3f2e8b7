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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlirobust/nlirobust.hpp"
#include "support/fixtures.hpp"
#include "support/stub_server.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace nlirobust;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << x;
  return o.str();
}

const std::vector<NliExample>& corpus_1k() {
  static const auto c = testing::synthetic_corpus(1000, 2024);
  return c;
}

// ---- 1 ----
void reference_rows(Outcome& o) {
  const auto start = Clock::now();
  const Lexicons lex = Lexicons::load(testing::data_dir());
  auto e = [&](std::string_view w) {
    const std::string* s = lex.emoji.emoji_for_word(w);
    return s ? *s : std::string("<missing>");
  };
  auto combined = [&](const std::string& text, std::string_view token) {
    return insert_noise(detail::slang_then_emoji(text, lex).text, token).text;
  };
  struct Row {
    std::string got, want;
  };
  const std::vector<Row> rows = {
      {apply_emoji("A man is running in the park.", lex.emoji).text,
       "A " + e("man") + " is " + e("running") + " in the " + e("park") + "."},
      {apply_emoji("A woman holds a picture of her friend.", lex.emoji).text,
       "A " + e("woman") + " holds a " + e("picture") + " of her " + e("friend") + "."},
      {apply_slang("I am going to call my friend tomorrow.", lex.slang).text,
       "I am gonna call my homie tomorrow."},
      {apply_slang("She is trying to take a picture of the dog.", lex.slang).text,
       "She is tryna take a pic of the dog."},
      {insert_noise("Boys play football.", "deadass").text, "Boys play football deadass."},
      {insert_noise("Someone is near the water.", "no cap").text,
       "Someone is near the water no cap."},
      {combined("A woman is going to take a picture of her friend.", "tbh"),
       "A " + e("woman") + " is gonna take a pic of her homie tbh."},
      {combined("Two dogs are running outside.", "lowkey"),
       "Two " + e("dogs") + " are " + e("running") + " outside lowkey."},
  };
  std::size_t ok = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool match = rows[i].got == rows[i].want;
    ok += match;
    o.check(match, "row " + std::to_string(i + 1) + " got \"" + rows[i].got + "\"");
  }
  // Emoji positions must be the lexicon's own emoji, not placeholders.
  o.check(e("man") != "<missing>" && e("dogs") != "<missing>", "lexicon emoji present");
  const double secs = seconds_since(start);
  o.check(secs < 1.0, "runtime under 1s");
  o.detail << ok << "/8 rows exact, " << fmt(secs * 1000, 1) << " ms including lexicon load";
}

// ---- 2 ----
void roundtrip(Outcome& o) {
  const auto& lex = testing::lexicons();
  const auto& eng = testing::engine();
  const auto demo = load_dataset(std::filesystem::path(NLIROBUST_SOURCE_DIR) / "demo" /
                                 "snli_sample.jsonl")
                        .examples;
  double min_recall = 1.0;
  for (const auto* corpus : {&corpus_1k(), &demo}) {
    for (std::uint64_t seed : {42ull, 7ull}) {
      for (Variant v : {Variant::kNoise, Variant::kCombined}) {
        const auto d = generate_variant(*corpus, v, seed, eng);
        const auto m = roundtrip_metrics(*corpus, d.examples, d.traces, lex);
        min_recall = std::min(min_recall, m.noise_recall);
      }
    }
  }
  o.check(min_recall == 1.0, "noise recall 1.000");

  const auto slang = generate_variant(corpus_1k(), Variant::kSlang, 42, eng);
  const auto ms = roundtrip_metrics(corpus_1k(), slang.examples, slang.traces, lex);
  o.check(ms.slang_exact >= 0.95, "slang exact >= 0.95");

  // Brute-force recount: invert each emoji on its own and compare with the
  // source word, case-insensitively.
  const auto emoji = generate_variant(corpus_1k(), Variant::kEmoji, 42, eng);
  const auto me = roundtrip_metrics(corpus_1k(), emoji.examples, emoji.traces, lex);
  std::size_t total = 0, exact = 0;
  for (const auto& t : emoji.traces) {
    for (const auto& r : t.replacements) {
      if (r.kind != ReplacementKind::kEmoji) continue;
      ++total;
      exact += unicode::fold_case(invert_emoji(r.replacement_text, lex.emoji)) ==
               unicode::fold_case(r.original_text);
    }
  }
  o.check(total == me.emoji_replacements && exact == me.emoji_exact_count,
          "emoji recount matches");
  o.detail << "noise recall " << fmt(min_recall, 3) << ", slang exact " << fmt(ms.slang_exact, 3)
           << " (" << ms.slang_exact_count << "/" << ms.slang_examples << "), emoji exact "
           << fmt(me.emoji_exact, 3) << " = recount " << exact << "/" << total;
}

// ---- 3 ----
void unk_mechanism(Outcome& o) {
  const auto wp =
      WordPieceVocab::load(testing::data_dir() / "vocab" / "wordpiece-uncased-30k.txt");
  o.check(wp.size() >= 30000, "30K vocabulary");
  const auto& eng = testing::engine();
  std::ostringstream d;
  for (Variant v : {Variant::kOriginal, Variant::kSlang, Variant::kNoise, Variant::kEmoji}) {
    const auto data = generate_variant(corpus_1k(), v, 42, eng);
    const auto s = unk_stats(data.examples, wp, std::string(variant_name(v)));
    std::size_t from_transforms = 0;
    for (const auto& t : data.traces) {
      for (const auto& r : t.replacements) from_transforms += count_unk(r.replacement_text, wp);
    }
    if (v == Variant::kEmoji) {
      o.check(*s.mean_unk_per_example >= 1.0, "emoji mean UNK >= 1");
      o.check(*s.pct_examples_with_unk >= 80.0, "emoji pct >= 80");
    } else {
      o.check(from_transforms == 0, std::string(variant_name(v)) + " transform tokens give 0 UNK");
      o.check(*s.mean_unk_per_example == 0.0, std::string(variant_name(v)) + " 0 UNK");
    }
    d << variant_name(v) << " " << fmt(*s.mean_unk_per_example, 3) << "/"
      << fmt(*s.pct_examples_with_unk, 1) << "% ";
  }
  o.detail << "mean UNK/pct with UNK: " << d.str();
}

// ---- 4 ----
void fragmentation(Outcome& o) {
  const auto bpe = BpeVocab::load(testing::data_dir() / "vocab" / "vocab.json",
                                  testing::data_dir() / "vocab" / "merges.txt");
  o.check(bpe.size() >= 50000, "50K vocabulary");
  const auto& eng = testing::engine();
  auto ratio = [&](Variant v) {
    return *fragmentation_stats(generate_variant(corpus_1k(), v, 42, eng).examples, bpe)
                .mean_subwords_per_word;
  };
  const double orig = ratio(Variant::kOriginal);
  const double noise = ratio(Variant::kNoise);
  const double emoji = ratio(Variant::kEmoji);
  o.check(emoji > noise && noise > orig, "emoji > noise > original");

  SplitMix64 rng(4);
  std::size_t failures = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    const auto len = rng.below(32);
    for (std::uint64_t k = 0; k < len; ++k) {
      char32_t c;
      switch (rng.below(5)) {
        case 0: c = static_cast<char32_t>(0x20 + rng.below(0x5F)); break;
        case 1: c = static_cast<char32_t>(0x80 + rng.below(0x780)); break;
        case 2: c = static_cast<char32_t>(0x1F300 + rng.below(0x400)); break;
        case 3: c = static_cast<char32_t>(1 + rng.below(0xD7FF)); break;
        default: c = static_cast<char32_t>(0xE000 + rng.below(0x10FFFF - 0xE000)); break;
      }
      unicode::append_utf8(s, c);
    }
    failures += bpe_decode(bpe_tokenize(s, bpe), bpe) != s;
  }
  o.check(failures == 0, "decode(encode(s)) == s");
  o.detail << "subwords/word emoji " << fmt(emoji, 3) << " > noise " << fmt(noise, 3)
           << " > original " << fmt(orig, 3) << "; round trip failures " << failures << "/10000";
}

// ---- 5 ----
void stats_oracles(Outcome& o) {
  const auto start = Clock::now();
  struct Ref {
    std::size_t b, c;
    double stat, p;
  };
  // scipy.stats.chi2.sf on the corrected statistic.
  const std::vector<Ref> refs = {{10, 0, 8.1, 0.004426525857919834},
                                 {12, 3, 4.266666666666667, 0.03886710381241731},
                                 {40, 25, 3.0153846153846153, 0.08247788747320971},
                                 {100, 70, 4.947058823529412, 0.02613509411386816},
                                 {7, 1, 3.125, 0.07709987174354202}};
  auto sig3 = [](double got, double want) { return std::abs(got - want) <= 5e-4 * std::abs(want); };
  for (const auto& r : refs) {
    const auto m = mcnemar_from_counts(r.b, r.c);
    o.check(sig3(m.statistic, r.stat) && sig3(m.p_value, r.p),
            "oracle (" + std::to_string(r.b) + "," + std::to_string(r.c) + ")");
  }
  const auto eq = mcnemar_from_counts(5, 5);
  o.check(eq.statistic == 0.0 && eq.p_value == 1.0, "b=c clamps to 0");
  const auto none = mcnemar_from_counts(0, 0);
  o.check(none.p_value == 1.0 && none.no_discordant_pairs, "b+c=0 convention");
  const double threshold = BonferroniFamily{"ft", 30, 0.05}.threshold();
  o.check(std::abs(threshold - 0.0016667) < 5e-8, "Bonferroni 0.05/30");

  SplitMix64 rng(2025);
  std::size_t fp = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto a = testing::bernoulli(9842, 0.89, rng);
    const auto b = testing::bernoulli(9842, 0.89, rng);
    fp += mcnemar(a, b).p_value < 0.05;
  }
  const double fpr = fp / 1000.0;
  o.check(fpr >= 0.03 && fpr <= 0.07, "false-positive rate 5% +/- 2pp");

  std::size_t covered = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto v = testing::bernoulli(500, 0.8, rng);
    const auto ci = bootstrap_ci(v, kDefaultReplicates, t);
    covered += ci.lower <= 0.8 && 0.8 <= ci.upper;
  }
  const double coverage = covered / 1000.0;
  o.check(coverage >= 0.93 && coverage <= 0.97, "coverage 95% +/- 2pp");
  const double secs = seconds_since(start);
  o.check(secs < 120, "runtime under 2 min");
  o.detail << "5/5 McNemar oracles, threshold " << fmt(threshold, 7) << ", FPR "
           << fmt(100 * fpr, 1) << "%, coverage " << fmt(100 * coverage, 1) << "%, "
           << fmt(secs, 1) << " s";
}

// ---- 6 ----
void margins(Outcome& o) {
  const std::size_t n = 9842;
  std::ostringstream d;
  for (double acc : {0.80, 0.83, 0.86, 0.89, 0.93}) {
    // Exactly round(acc * n) correct, shuffled.
    const auto hits = static_cast<std::size_t>(std::llround(acc * n));
    std::vector<bool> v(n, false);
    for (std::size_t i = 0; i < hits; ++i) v[i] = true;
    SplitMix64 rng(9);
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = rng.below(i + 1);
      const bool tmp = v[i];
      v[i] = v[j];
      v[j] = tmp;
    }
    const double hw = 100 * bootstrap_ci(v).half_width();
    const double normal = 100 * 1.96 * std::sqrt(acc * (1 - acc) / n);
    o.check(hw >= 0.2 && hw <= 0.7, "half-width at " + fmt(acc, 2) + " is " + fmt(hw, 3) + "pp");
    d << fmt(acc, 2) << ": " << fmt(hw, 3) << "pp (normal " << fmt(normal, 3) << ") ";
  }
  o.detail << d.str();
}

// ---- 7 ----
void augmentation(Outcome& o) {
  const auto corpus = testing::synthetic_corpus(100000, 42);
  const auto& eng = testing::engine();
  const auto start = Clock::now();
  const auto a = augment_dataset(corpus, 42, eng);
  const double secs = seconds_since(start);
  const auto b = augment_dataset(corpus, 42, eng, 4);
  const double bound = 3 * std::sqrt(25000.0);
  const double dev = static_cast<double>(a.size()) - 150000.0;
  o.check(std::abs(dev) <= bound, "size within 150000 +/- " + fmt(bound, 1));
  const auto da = dataset_digest(a);
  const auto db = dataset_digest(b);
  o.check(da == db, "bit-identical rerun");
  o.detail << a.size() << " examples (deviation " << fmt(dev, 0) << ", bound " << fmt(bound, 1)
           << "), rerun digest " << (da == db ? "identical" : "different") << ", "
           << fmt(secs, 1) << " s";
}

// ---- 8 ----
void report_identities(Outcome& o) {
  std::size_t checks = 0;
  double worst_diag = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto gold = testing::synthetic_corpus(1500, seed);
    const auto base = testing::simulate_predictions(gold, 0.55 + 0.02 * seed, seed * 11, "b");
    const auto mit = testing::simulate_predictions(gold, 0.6 + 0.015 * seed, seed * 13, "m");
    for (const auto* p : {&base, &mit}) {
      const auto t = confusion(gold, *p);
      const auto s = score(*p, gold);
      std::size_t diag = 0;
      for (Label l : kLabels) diag += t.counts[label_index(l)][label_index(l)];
      o.check(diag == static_cast<std::size_t>(std::count(s.correct.begin(), s.correct.end(), true)),
              "diagonal count equals hits");
      worst_diag = std::max(worst_diag, std::abs(t.weighted_diagonal() - accuracy(s.correct)));
      for (Label l : kLabels) {
        const auto row = t.rounded_row(l);
        const int sum = row[0] + row[1] + row[2] + row[3];
        o.check(std::abs(sum - 100) <= 1, "row sums to 100");
      }
      ++checks;
    }
    const auto r = recovery(gold, base, mit);
    const double delta = accuracy(score(mit, gold).correct) - accuracy(score(base, gold).correct);
    o.check(static_cast<long long>(r.recovered) - static_cast<long long>(r.regressed) ==
                std::llround(gold.size() * delta),
            "recovered - regressed = n * delta");
  }
  o.check(worst_diag < 1e-12, "weighted diagonal equals accuracy");
  o.detail << checks << " confusion tables, 20 recovery pairs; max |diag - acc| "
           << std::scientific << std::setprecision(1) << worst_diag;
}

// ---- 9 ----
void llm_protocol(Outcome& o) {
  testing::StubChatServer server([](const std::string& user) {
    switch (user.size() % 4) {
      case 0: return "entailment";
      case 1: return "Neutral.";
      case 2: return "contradiction";
      default: return "not sure";
    }
  });
  ::setenv("NLIROBUST_ACCEPTANCE_KEY", "k", 1);
  HttpChatTransport::Options topt;
  topt.base_url = server.url();
  topt.api_key_env = "NLIROBUST_ACCEPTANCE_KEY";
  HttpChatTransport transport(topt);
  ClassifyOptions opt;
  opt.rate_limit.max_in_flight = 4;
  opt.retry.sleep = [](std::chrono::milliseconds) {};

  const testing::TempDir dir;
  const auto gold = testing::synthetic_corpus(200, 99);
  ResponseCache c1(dir / "c1.jsonl");
  ResponseCache c2(dir / "c2.jsonl");
  const auto run1 = classify_batch(gold, "stub", c1, transport, opt);
  const auto run2 = classify_batch(gold, "stub", c2, transport, opt);
  o.check(serialize_predictions(run1) == serialize_predictions(run2), "deterministic");
  const int before = server.requests();
  ResponseCache warm_cache(dir / "c1.jsonl");
  const auto warm = classify_batch(gold, "stub", warm_cache, transport, opt);
  const int warm_calls = server.requests() - before;
  o.check(warm_calls == 0, "warm rerun makes zero calls");
  o.check(serialize_predictions(warm) == serialize_predictions(run1), "warm output identical");

  o.check(parse_label("entailment") == Label::kEntailment &&
              parse_label("Entailment.") == Label::kEntailment &&
              !parse_label("I think it is neutral").has_value(),
          "parse_label contract");

  // End to end through the command line: files on disk into compare and report.
  write_dataset(dir / "gold.jsonl", gold);
  write_predictions(dir / "llm.jsonl", run1);
  write_predictions(dir / "ft.jsonl", testing::simulate_predictions(gold, 0.9, 5, "ft"));
  auto run_cli = [](std::vector<std::string> args) {
    args.insert(args.begin(), "nlirobust");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  const int cmp = run_cli({"compare", "--gold", (dir / "gold.jsonl").string(), "--a",
                       (dir / "ft.jsonl").string(), "--b", (dir / "llm.jsonl").string(), "--m",
                       "10", "--family", "llm"});
  o.check(cmp == 0, "compare accepts the prediction file");

  const auto vdir = dir / "variants";
  const auto pdir = dir / "preds";
  std::filesystem::create_directories(pdir);
  const VariantManifest m =
      build_eval_variants(gold, 42, testing::engine(), vdir, "synthetic", 1);
  for (const auto& e : m.variants) {
    const auto examples = load_dataset(vdir / e.file_path).examples;
    ResponseCache cache(dir / "report-cache.jsonl");
    auto p = classify_batch(examples, "stub", cache, transport, opt);
    write_predictions(pdir / ("llm." + e.variant_name + ".jsonl"), p);
  }
  const int rep = run_cli({"--json", "report", "--gold-dir", vdir.string(), "--preds-dir",
                       pdir.string()});
  o.check(rep == 0, "report accepts the prediction files");
  o.detail << run1.records.size() << " predictions (" << run1.invalid_count()
           << " invalid), warm rerun calls " << warm_calls << ", compare exit " << cmp
           << ", report exit " << rep;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {"reference transform examples", reference_rows},
      {"round-trip guarantees", roundtrip},
      {"tokenizer UNK mechanism", unk_mechanism},
      {"fragmentation ordering", fragmentation},
      {"statistics oracles and calibration", stats_oracles},
      {"bootstrap margin magnitude", margins},
      {"augmentation size", augmentation},
      {"report identities", report_identities},
      {"LLM protocol", llm_protocol},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].fn(o);
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << "exception: " << ex.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].name
              << ": " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
