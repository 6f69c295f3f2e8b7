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
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nlirobust/augment.hpp"
#include "nlirobust/corpus.hpp"
#include "nlirobust/error.hpp"
#include "nlirobust/inverse.hpp"
#include "nlirobust/lexicon.hpp"
#include "nlirobust/llmclient.hpp"
#include "nlirobust/report.hpp"
#include "nlirobust/stats.hpp"
#include "nlirobust/tokenstats.hpp"
#include "nlirobust/transforms.hpp"
#include "nlirobust/variants.hpp"

#ifndef NLIROBUST_DEFAULT_DATA_DIR
#define NLIROBUST_DEFAULT_DATA_DIR "data"
#endif

namespace nlirobust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

// CLI11 config reader for JSON files. Nested objects map to subcommand
// sections, like TOML tables.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    nlohmann::ordered_json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        j[name] = res.size() == 1 ? nlohmann::ordered_json(res.front())
                                  : nlohmann::ordered_json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      auto nested = nlohmann::ordered_json::parse(to_config(sub, default_also, false, ""));
      if (!nested.empty()) j[sub->get_name()] = std::move(nested);
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw CLI::ConversionError(std::string("invalid JSON config: ") + ex.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
    std::vector<CLI::ConfigItem> out;
    collect(j, {}, out);
    return out;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("unsupported JSON config value " + v.dump());
  }

  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto sub = parents;
        sub.push_back(it.key());
        collect(*it, sub, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(*it));
      }
      out.push_back(std::move(item));
    }
  }
};

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::string data_dir;
  bool json = false;
  std::size_t jobs = 1;
};

inline std::string default_data_dir() {
  if (const char* env = std::getenv("NLIROBUST_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return NLIROBUST_DEFAULT_DATA_DIR;
}

inline std::filesystem::path find_manifest(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> found;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 14 && name.ends_with(".manifest.json")) found.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  if (found.size() != 1) {
    throw Error("expected exactly one *.manifest.json in " + dir.string() + ", found " +
                std::to_string(found.size()));
  }
  return found.front();
}

struct GoldDir {
  std::filesystem::path dir;
  VariantManifest manifest;
  GoldVariants variants;
};

inline GoldDir load_gold_dir(const std::filesystem::path& dir) {
  GoldDir g{dir, load_manifest(find_manifest(dir)), {}};
  validate_manifest(g.manifest, dir);
  for (Variant v : kVariants) {
    const VariantEntry* e = g.manifest.find(variant_name(v));
    g.variants[v] = load_dataset(dir / e->file_path).examples;
  }
  return g;
}

inline nlohmann::ordered_json to_json(const RoundtripMetrics& m) {
  nlohmann::ordered_json j;
  j["slang_exact"] = m.slang_exact;
  j["slang_examples"] = m.slang_examples;
  j["slang_exact_count"] = m.slang_exact_count;
  j["emoji_exact"] = m.emoji_exact;
  j["emoji_replacements"] = m.emoji_replacements;
  j["emoji_exact_count"] = m.emoji_exact_count;
  j["noise_recall"] = m.noise_recall;
  j["noise_insertions"] = m.noise_insertions;
  j["noise_removed_count"] = m.noise_removed_count;
  return j;
}

inline std::string fixed(double x, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << x;
  return o.str();
}

inline Variant variant_arg(const std::string& s) {
  auto v = parse_variant(s);
  if (!v) throw UsageError("unknown variant '" + s + "'");
  return *v;
}

inline std::string stem_of(const std::filesystem::path& p) {
  std::string name = p.filename().string();
  if (name.ends_with(".jsonl")) name.resize(name.size() - 6);
  return name;
}

// ---- subcommands ----------------------------------------------------------------

struct VariantsArgs {
  std::string in;
  std::string out_dir;
  std::string name;
};

inline int cmd_variants(const VariantsArgs& a, const GlobalOptions& g, std::ostream& out) {
  const LoadResult data = load_dataset(a.in);
  const TransformEngine engine(Lexicons::load(g.data_dir));
  const std::string name = a.name.empty() ? stem_of(a.in) : a.name;
  const VariantManifest m =
      build_eval_variants(data.examples, g.seed, engine, a.out_dir, name, g.jobs);
  if (g.json) {
    auto j = to_json(m);
    j["dropped_unlabeled"] = data.dropped_unlabeled;
    out << j.dump() << '\n';
  } else {
    for (const auto& e : m.variants) {
      out << e.variant_name << '\t' << e.example_count << '\t' << e.file_path << '\n';
    }
    out << "dropped_unlabeled\t" << data.dropped_unlabeled << '\n';
  }
  return kExitOk;
}

struct TransformArgs {
  std::string in;
  std::string out;
  std::string variant;
  std::string trace;
};

inline int cmd_transform(const TransformArgs& a, const GlobalOptions& g, std::ostream& out) {
  const Variant v = variant_arg(a.variant);
  const LoadResult data = load_dataset(a.in);
  const TransformEngine engine(Lexicons::load(g.data_dir));
  const VariantData result = generate_variant(data.examples, v, g.seed, engine, g.jobs);
  write_dataset(a.out, result.examples);
  if (!a.trace.empty()) write_text_file(a.trace, serialize_traces(result.traces));
  std::size_t replaced = 0;
  for (const auto& t : result.traces) replaced += t.replacements.size();
  if (g.json) {
    nlohmann::ordered_json j;
    j["variant"] = variant_name(v);
    j["examples"] = result.examples.size();
    j["replacements"] = replaced;
    j["dropped_unlabeled"] = data.dropped_unlabeled;
    out << j.dump() << '\n';
  } else {
    out << variant_name(v) << ": " << result.examples.size() << " examples, " << replaced
        << " replacements\n";
  }
  return kExitOk;
}

struct PreprocessArgs {
  std::string in;
  std::string out;
};

inline int cmd_preprocess(const PreprocessArgs& a, const GlobalOptions& g, std::ostream& out) {
  const LoadResult data = load_dataset(a.in);
  const Lexicons lex = Lexicons::load(g.data_dir);
  std::vector<NliExample> cleaned(data.examples.size());
  parallel_for(cleaned.size(), g.jobs,
               [&](std::size_t i) { cleaned[i] = preprocess(data.examples[i], lex); });
  write_dataset(a.out, cleaned);
  if (g.json) {
    out << nlohmann::ordered_json{{"examples", cleaned.size()}}.dump() << '\n';
  } else {
    out << "preprocessed " << cleaned.size() << " examples\n";
  }
  return kExitOk;
}

struct AugmentArgs {
  std::string in;
  std::string out;
};

inline int cmd_augment(const AugmentArgs& a, const GlobalOptions& g, std::ostream& out) {
  const LoadResult data = load_dataset(a.in);
  const TransformEngine engine(Lexicons::load(g.data_dir));
  const auto augmented = augment_dataset(data.examples, g.seed, engine, g.jobs);
  write_dataset(a.out, augmented);
  std::map<std::string, std::size_t> by_transform;
  for (std::size_t i = data.examples.size(); i < augmented.size(); ++i) {
    ++by_transform[augmented[i].transform.value_or("")];
  }
  if (g.json) {
    nlohmann::ordered_json j;
    j["input"] = data.examples.size();
    j["output"] = augmented.size();
    j["copies"] = augmented.size() - data.examples.size();
    j["copies_by_transform"] = by_transform;
    j["digest"] = dataset_digest(augmented);
    out << j.dump() << '\n';
  } else {
    out << data.examples.size() << " -> " << augmented.size() << " examples\n";
    for (const auto& [t, n] : by_transform) out << "  " << t << '\t' << n << '\n';
  }
  return kExitOk;
}

struct TokenstatsArgs {
  std::vector<std::string> in;
  std::string gold_dir;
  std::string wordpiece;
  std::string bpe_vocab;
  std::string bpe_merges;
};

inline int cmd_tokenstats(const TokenstatsArgs& a, const GlobalOptions& g, std::ostream& out) {
  const std::filesystem::path vocab_dir = std::filesystem::path(g.data_dir) / "vocab";
  const auto wp = WordPieceVocab::load(
      a.wordpiece.empty() ? vocab_dir / "wordpiece-uncased-30k.txt"
                          : std::filesystem::path(a.wordpiece));
  const auto bpe =
      BpeVocab::load(a.bpe_vocab.empty() ? vocab_dir / "vocab.json" : std::filesystem::path(a.bpe_vocab),
                     a.bpe_merges.empty() ? vocab_dir / "merges.txt" : std::filesystem::path(a.bpe_merges));

  std::vector<std::pair<std::string, std::vector<NliExample>>> sets;
  if (!a.gold_dir.empty()) {
    GoldDir gd = load_gold_dir(a.gold_dir);
    for (auto& [v, examples] : gd.variants) {
      sets.emplace_back(std::string(variant_name(v)), std::move(examples));
    }
  }
  for (const auto& path : a.in) sets.emplace_back(stem_of(path), load_dataset(path).examples);
  if (sets.empty()) throw UsageError("tokenstats needs --in or --gold-dir");

  auto rows = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << std::left << std::setw(24) << "variant" << std::right << std::setw(10) << "unk/ex"
       << std::setw(10) << "%unk" << std::setw(12) << "sub/word" << '\n';
  for (const auto& [name, examples] : sets) {
    TokenizationStats s = unk_stats(examples, wp, name);
    s.mean_subwords_per_word = fragmentation_stats(examples, bpe, name).mean_subwords_per_word;
    rows.push_back(to_json(s));
    text << std::left << std::setw(24) << name << std::right << std::setw(10)
         << fixed(*s.mean_unk_per_example, 3) << std::setw(10)
         << fixed(*s.pct_examples_with_unk, 1) << std::setw(12)
         << fixed(*s.mean_subwords_per_word, 3) << '\n';
  }
  if (g.json) {
    out << rows.dump() << '\n';
  } else {
    out << text.str();
  }
  return kExitOk;
}

struct LlmEvalArgs {
  std::string model;
  std::string in;
  std::string cache;
  std::string out;
  std::string variant;
  std::string base_url = "https://api.openai.com";
  std::string api_key_env{kDefaultApiKeyEnv};
  std::size_t concurrency = 4;
  double rps = 0.0;
  std::size_t max_attempts = 5;
};

inline int cmd_llm_eval(const LlmEvalArgs& a, const GlobalOptions& g, std::ostream& out) {
  const LoadResult data = load_dataset(a.in);
  ResponseCache cache(a.cache);
  HttpChatTransport::Options topt;
  topt.base_url = a.base_url;
  topt.api_key_env = a.api_key_env;
  std::unique_ptr<HttpChatTransport> transport;
  std::once_flag once;
  auto lazy = [&]() -> ChatTransport& {
    std::call_once(once, [&] { transport = std::make_unique<HttpChatTransport>(topt); });
    return *transport;
  };
  // Only require credentials when something is not cached.
  struct Deferred : ChatTransport {
    std::function<ChatTransport&()> get;
    std::string complete(const LlmRequest& r) override { return get().complete(r); }
  } deferred;
  deferred.get = lazy;

  ClassifyOptions opt;
  opt.rate_limit.max_in_flight = a.concurrency;
  opt.rate_limit.requests_per_second = a.rps;
  opt.retry.max_attempts = a.max_attempts;
  opt.variant_name = a.variant.empty() ? stem_of(a.in) : a.variant;
  const PredictionFile preds = classify_batch(data.examples, a.model, cache, deferred, opt);
  write_predictions(a.out, preds);
  if (g.json) {
    nlohmann::ordered_json j;
    j["model"] = preds.model_name;
    j["variant"] = preds.variant_name;
    j["examples"] = preds.records.size();
    j["cache_hits"] = preds.metadata["cache_hits"];
    j["network_requests"] = preds.metadata["network_requests"];
    j["invalid"] = preds.invalid_count();
    out << j.dump() << '\n';
  } else {
    out << preds.records.size() << " predictions, " << preds.metadata["cache_hits"].dump()
        << " cached, " << preds.metadata["network_requests"].dump() << " requested, "
        << preds.invalid_count() << " invalid\n";
  }
  return kExitOk;
}

struct CompareArgs {
  std::string gold;
  std::string a;
  std::string b;
  std::string family = "default";
  std::size_t m = 1;
  double alpha = 0.05;
};

inline int cmd_compare(const CompareArgs& c, const GlobalOptions&, std::ostream& out) {
  const auto gold = load_dataset(c.gold).examples;
  const PredictionFile pa = load_predictions(c.a);
  const PredictionFile pb = load_predictions(c.b);
  const PairedCorrectness paired = align(pa, pb, gold);
  const McNemarResult r = mcnemar(paired.a, paired.b);
  const BonferroniFamily family{c.family, c.m, c.alpha};
  const FamilyVerdicts v = compare_family({{stem_of(c.a) + " vs " + stem_of(c.b), r}}, family);

  nlohmann::ordered_json j;
  j["family"] = v.family_name;
  j["m"] = v.m;
  j["alpha"] = v.alpha;
  j["threshold"] = v.threshold;
  j["a"] = {{"path", c.a}, {"accuracy", accuracy(paired.a)}, {"invalid", paired.invalid_a}};
  j["b"] = {{"path", c.b}, {"accuracy", accuracy(paired.b)}, {"invalid", paired.invalid_b}};
  j["mcnemar"] = to_json(r);
  j["significant"] = v.verdicts.front().significant;
  out << j.dump() << '\n';
  return kExitOk;
}

struct ReportArgs {
  std::string gold_dir;
  std::string preds_dir;
  std::vector<std::string> approaches;
  bool margins = false;
  std::string csv;
  std::string baseline;
  std::string mitigated;
};

// Prediction files are named <approach>.<variant>.jsonl.
inline PredictionGrid load_prediction_dir(const std::filesystem::path& dir,
                                          std::vector<std::string>& approaches_found) {
  PredictionGrid grid;
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    const std::string name = p.filename().string();
    for (Variant v : kVariants) {
      const std::string suffix = "." + std::string(variant_name(v)) + ".jsonl";
      if (name.size() > suffix.size() && name.ends_with(suffix)) {
        const std::string approach = name.substr(0, name.size() - suffix.size());
        grid.emplace(std::make_pair(approach, v), load_predictions(p));
        if (std::find(approaches_found.begin(), approaches_found.end(), approach) ==
            approaches_found.end()) {
          approaches_found.push_back(approach);
        }
      }
    }
  }
  return grid;
}

inline int cmd_report(const ReportArgs& a, const GlobalOptions& g, std::ostream& out) {
  const GoldDir gold = load_gold_dir(a.gold_dir);
  std::vector<std::string> found;
  const PredictionGrid grid = load_prediction_dir(a.preds_dir, found);
  const std::vector<std::string> approaches = a.approaches.empty() ? found : a.approaches;
  if (approaches.empty()) throw Error("no prediction files in " + a.preds_dir);

  MarginOptions margins;
  margins.enabled = a.margins;
  margins.jobs = g.jobs;
  const AccuracyTable table = accuracy_table(gold.variants, grid, approaches, margins);
  if (!a.csv.empty()) write_text_file(a.csv, to_csv(table));

  nlohmann::ordered_json j;
  j["accuracy"] = to_json(table);
  std::ostringstream text;
  text << "Accuracy (%)\n" << to_text(table);

  nlohmann::ordered_json conf;
  for (const auto& approach : approaches) {
    for (Variant v : kVariants) {
      const auto& examples = gold.variants.at(v);
      const auto& preds = grid.at({approach, v});
      const ConfusionTable ct = confusion(examples, preds);
      const TransitionCounts tc = transition_counts(examples, preds);
      const auto share = neutral_error_share(tc);
      nlohmann::ordered_json cell = to_json(ct);
      cell["error_transitions"] = to_json(tc);
      cell["neutral_error_share"] = share ? nlohmann::ordered_json(*share) : nlohmann::ordered_json(nullptr);
      conf[approach][std::string(variant_name(v))] = std::move(cell);
      text << "\nPredicted label distribution (%), " << approach << " / " << variant_name(v)
           << "\n"
           << render_confusion(ct) << "share of errors predicted NEU (derived): "
           << (share ? fixed(100.0 * *share, 1) + "%" : std::string("n/a")) << '\n';
    }
  }
  j["confusion"] = std::move(conf);

  if (!a.baseline.empty() || !a.mitigated.empty()) {
    if (a.baseline.empty() || a.mitigated.empty()) {
      throw UsageError("--baseline and --mitigated must be given together");
    }
    nlohmann::ordered_json rec;
    for (Variant v : kVariants) {
      const auto* base = grid.contains({a.baseline, v}) ? &grid.at({a.baseline, v}) : nullptr;
      const auto* mit = grid.contains({a.mitigated, v}) ? &grid.at({a.mitigated, v}) : nullptr;
      if (base == nullptr || mit == nullptr) {
        std::vector<std::pair<std::string, std::string>> missing;
        if (!base) missing.emplace_back(a.baseline, std::string(variant_name(v)));
        if (!mit) missing.emplace_back(a.mitigated, std::string(variant_name(v)));
        throw MissingCell(std::move(missing));
      }
      const RecoveryAnalysis r = recovery(gold.variants.at(v), *base, *mit);
      rec[std::string(variant_name(v))] = to_json(r);
      text << "\nRecovery " << a.baseline << " -> " << a.mitigated << " / " << variant_name(v)
           << ": recovered " << r.recovered << ", regressed " << r.regressed << ", ratio "
           << (r.ratio ? fixed(*r.ratio, 2) : std::string("undefined")) << '\n';
    }
    j["recovery"] = std::move(rec);
  }

  if (g.json) {
    out << j.dump() << '\n';
  } else {
    out << text.str();
  }
  return kExitOk;
}

struct RoundtripArgs {
  std::string gold_dir;
};

inline int cmd_roundtrip(const RoundtripArgs& a, const GlobalOptions& g, std::ostream& out) {
  const GoldDir gold = load_gold_dir(a.gold_dir);
  const Lexicons lex = Lexicons::load(g.data_dir);
  const auto& original = gold.variants.at(Variant::kOriginal);
  nlohmann::ordered_json j;
  std::ostringstream text;
  for (Variant v : kTransformVariants) {
    const auto traces =
        load_traces(gold.dir / trace_file_name(gold.manifest.source_dataset, v));
    const RoundtripMetrics m = roundtrip_metrics(original, gold.variants.at(v), traces, lex);
    j[std::string(variant_name(v))] = to_json(m);
    text << variant_name(v) << ": slang_exact " << fixed(m.slang_exact, 3) << " ("
         << m.slang_exact_count << "/" << m.slang_examples << "), emoji_exact "
         << fixed(m.emoji_exact, 3) << " (" << m.emoji_exact_count << "/"
         << m.emoji_replacements << "), noise_recall " << fixed(m.noise_recall, 3) << " ("
         << m.noise_removed_count << "/" << m.noise_insertions << ")\n";
  }
  if (g.json) {
    out << j.dump() << '\n';
  } else {
    out << text.str();
  }
  return kExitOk;
}

// ---- entry point ----------------------------------------------------------------

inline bool wants_json_config(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    std::string_view arg = argv[i];
    std::string_view value;
    if (arg == "--config" && i + 1 < argc) {
      value = argv[i + 1];
    } else if (arg.starts_with("--config=")) {
      value = arg.substr(9);
    } else {
      continue;
    }
    return value.ends_with(".json");
  }
  return false;
}

// Parses argv and runs one subcommand. Returns 0 on success, 1 on an
// operational error and 2 on a usage error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robustness toolkit for NLI models under informal text transforms", "nlirobust"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  GlobalOptions g;
  g.data_dir = default_data_dir();
  app.add_option("--seed", g.seed, "Dataset seed for all randomness")->capture_default_str();
  app.add_option("--data-dir", g.data_dir, "Directory with lexicons and vocabularies")
      ->capture_default_str();
  app.add_flag("--json", g.json, "Machine-readable JSON on stdout");
  app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(
      CLI::PositiveNumber);
  app.set_config("--config", "", "TOML or JSON config file mirroring the flags");
  if (wants_json_config(argc, argv)) app.config_formatter(std::make_shared<JsonConfig>());

  VariantsArgs variants;
  auto* sc = app.add_subcommand("variants", "Build the five evaluation variants and a manifest");
  sc->add_option("--in", variants.in, "Input JSONL dataset")->required();
  sc->add_option("--out-dir", variants.out_dir, "Output directory")->required();
  sc->add_option("--name", variants.name, "Dataset name used in file names");

  TransformArgs transform;
  sc = app.add_subcommand("transform", "Apply one transform to a dataset");
  sc->add_option("--in", transform.in)->required();
  sc->add_option("--out", transform.out)->required();
  sc->add_option("--variant", transform.variant, "original|slang|emoji|noise|combined")
      ->required();
  sc->add_option("--trace", transform.trace, "Write the transform trace JSONL here");

  PreprocessArgs pre;
  sc = app.add_subcommand("preprocess", "Apply the inverse transforms");
  sc->add_option("--in", pre.in)->required();
  sc->add_option("--out", pre.out)->required();

  AugmentArgs aug;
  sc = app.add_subcommand("augment", "Add transformed training copies");
  sc->add_option("--in", aug.in)->required();
  sc->add_option("--out", aug.out)->required();

  TokenstatsArgs tok;
  sc = app.add_subcommand("tokenstats", "WordPiece [UNK] and BPE fragmentation statistics");
  sc->add_option("--in", tok.in, "Dataset (repeatable)");
  sc->add_option("--gold-dir", tok.gold_dir, "Variant directory with a manifest");
  sc->add_option("--wordpiece", tok.wordpiece, "WordPiece vocab.txt");
  sc->add_option("--bpe-vocab", tok.bpe_vocab, "Byte-level BPE vocab.json");
  sc->add_option("--bpe-merges", tok.bpe_merges, "Byte-level BPE merges.txt");

  LlmEvalArgs llm;
  sc = app.add_subcommand("llm-eval", "Zero-shot chat model predictions with a response cache");
  sc->add_option("--model", llm.model)->required();
  sc->add_option("--in", llm.in)->required();
  sc->add_option("--cache", llm.cache)->required();
  sc->add_option("--out", llm.out)->required();
  sc->add_option("--variant", llm.variant, "Variant name recorded in the predictions");
  sc->add_option("--base-url", llm.base_url)->capture_default_str();
  sc->add_option("--api-key-env", llm.api_key_env, "Environment variable holding the key")
      ->capture_default_str();
  sc->add_option("--concurrency", llm.concurrency)->capture_default_str()->check(
      CLI::PositiveNumber);
  sc->add_option("--rps", llm.rps, "Request rate limit, 0 for none")->capture_default_str();
  sc->add_option("--max-attempts", llm.max_attempts)->capture_default_str()->check(
      CLI::PositiveNumber);

  CompareArgs cmp;
  sc = app.add_subcommand("compare", "McNemar test between two prediction files");
  sc->add_option("--gold", cmp.gold)->required();
  sc->add_option("--a", cmp.a)->required();
  sc->add_option("--b", cmp.b)->required();
  sc->add_option("--family", cmp.family)->capture_default_str();
  sc->add_option("--m", cmp.m, "Bonferroni family size")->capture_default_str()->check(
      CLI::PositiveNumber);
  sc->add_option("--alpha", cmp.alpha)->capture_default_str();

  ReportArgs rep;
  sc = app.add_subcommand("report", "Accuracy, confusion and recovery tables");
  sc->add_option("--gold-dir", rep.gold_dir)->required();
  sc->add_option("--preds-dir", rep.preds_dir)->required();
  sc->add_option("--approach", rep.approaches, "Row order (repeatable)");
  sc->add_flag("--margins", rep.margins, "Add bootstrap 95% half-widths");
  sc->add_option("--csv", rep.csv, "Write the accuracy table as CSV");
  sc->add_option("--baseline", rep.baseline, "Approach used as recovery baseline");
  sc->add_option("--mitigated", rep.mitigated, "Approach compared against the baseline");

  RoundtripArgs rt;
  sc = app.add_subcommand("roundtrip", "Inverse-transform round-trip rates from traces");
  sc->add_option("--gold-dir", rt.gold_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << (ex.get_name() == "CallForVersion" ? std::string(ex.what()) : app.help());
      return kExitOk;
    }
    err << "usage error: " << ex.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "variants") return cmd_variants(variants, g, out);
    if (cmd == "transform") return cmd_transform(transform, g, out);
    if (cmd == "preprocess") return cmd_preprocess(pre, g, out);
    if (cmd == "augment") return cmd_augment(aug, g, out);
    if (cmd == "tokenstats") return cmd_tokenstats(tok, g, out);
    if (cmd == "llm-eval") return cmd_llm_eval(llm, g, out);
    if (cmd == "compare") return cmd_compare(cmp, g, out);
    if (cmd == "report") return cmd_report(rep, g, out);
    if (cmd == "roundtrip") return cmd_roundtrip(rt, g, out);
    throw UsageError("unknown subcommand " + cmd);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitError;
  }
}

}  // namespace nlirobust::cli
