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
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlirobust/corpus.hpp"
#include "nlirobust/error.hpp"
#include "nlirobust/parallel.hpp"
#include "nlirobust/rng.hpp"

namespace nlirobust {

inline constexpr std::string_view kInvalidLabel = "invalid";

// A predicted label; nullopt is the "invalid" sentinel (an unparseable model
// response), which always scores as incorrect.
using Prediction = std::optional<Label>;

inline std::string_view prediction_name(const Prediction& p) {
  return p ? label_name(*p) : kInvalidLabel;
}

struct PredictionRecord {
  std::string id;
  Prediction label;
  std::optional<std::string> raw_response;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct PredictionFile {
  std::string model_name;
  std::string variant_name;
  std::vector<PredictionRecord> records;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t invalid_count() const {
    return static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const auto& r) { return !r.label; }));
  }
};

inline std::string serialize_predictions(const PredictionFile& p) {
  std::string out;
  for (const auto& r : p.records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["label"] = prediction_name(r.label);
    if (!p.model_name.empty()) j["model"] = p.model_name;
    if (!p.variant_name.empty()) j["variant"] = p.variant_name;
    if (r.raw_response) j["raw"] = *r.raw_response;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline void write_predictions(const std::filesystem::path& path, const PredictionFile& p) {
  write_text_file(path, serialize_predictions(p));
}

// JSONL records {id, label[, raw, model, variant]}. Labels are the three
// classes or "invalid".
inline PredictionFile parse_predictions(std::istream& in) {
  PredictionFile p;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw MalformedRecord(line_no, ex.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("label") || !j["label"].is_string()) {
      throw MalformedRecord(line_no, "prediction records need string id and label");
    }
    PredictionRecord r;
    r.id = j["id"].get<std::string>();
    const auto label = j["label"].get<std::string>();
    if (label != kInvalidLabel) {
      r.label = parse_label_name(label);
      if (!r.label) throw UnknownLabel(line_no, label);
    }
    if (j.contains("raw") && j["raw"].is_string()) r.raw_response = j["raw"].get<std::string>();
    if (p.model_name.empty() && j.contains("model") && j["model"].is_string()) {
      p.model_name = j["model"].get<std::string>();
    }
    if (p.variant_name.empty() && j.contains("variant") && j["variant"].is_string()) {
      p.variant_name = j["variant"].get<std::string>();
    }
    if (!seen.insert(r.id).second) throw DuplicateIdError(r.id);
    p.records.push_back(std::move(r));
  }
  return p;
}

inline PredictionFile load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  PredictionFile p = parse_predictions(in);
  p.metadata["path"] = path.string();
  return p;
}

// Predictions re-ordered to gold order.
struct ScoredPredictions {
  std::vector<Prediction> predicted;
  std::vector<bool> correct;
  std::size_t invalid = 0;
};

// Aligns one prediction file to the gold examples by id. Fails on any
// missing, extra or duplicated id instead of intersecting.
inline ScoredPredictions score(const PredictionFile& preds,
                               const std::vector<NliExample>& gold) {
  std::unordered_map<std::string_view, std::size_t> gold_pos;
  gold_pos.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold_pos.emplace(gold[i].id, i).second) throw DuplicateIdError(gold[i].id);
  }
  ScoredPredictions out;
  out.predicted.resize(gold.size());
  std::vector<bool> filled(gold.size(), false);
  std::vector<std::string> extra;
  for (const auto& r : preds.records) {
    auto it = gold_pos.find(r.id);
    if (it == gold_pos.end()) {
      extra.push_back(r.id);
      continue;
    }
    if (filled[it->second]) throw DuplicateIdError(r.id);
    filled[it->second] = true;
    out.predicted[it->second] = r.label;
  }
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!filled[i]) missing.push_back(gold[i].id);
  }
  if (!missing.empty() || !extra.empty()) {
    throw AlignmentError(std::move(missing), std::move(extra),
                         preds.model_name.empty() ? "predictions" : preds.model_name);
  }
  out.correct.resize(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    out.correct[i] = out.predicted[i] && *out.predicted[i] == gold[i].gold_label;
    out.invalid += !out.predicted[i];
  }
  return out;
}

struct PairedCorrectness {
  std::vector<bool> a;
  std::vector<bool> b;
  std::size_t invalid_a = 0;
  std::size_t invalid_b = 0;
};

inline PairedCorrectness align(const PredictionFile& pred_a, const PredictionFile& pred_b,
                               const std::vector<NliExample>& gold) {
  ScoredPredictions a = score(pred_a, gold);
  ScoredPredictions b = score(pred_b, gold);
  return {std::move(a.correct), std::move(b.correct), a.invalid, b.invalid};
}

inline double accuracy(const std::vector<bool>& correct) {
  if (correct.empty()) throw EmptyInput("accuracy of an empty vector");
  const auto hits = std::count(correct.begin(), correct.end(), true);
  return static_cast<double>(hits) / static_cast<double>(correct.size());
}

// ---- McNemar -----------------------------------------------------------------

struct McNemarResult {
  std::size_t b = 0;  // A correct, B wrong
  std::size_t c = 0;  // A wrong, B correct
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_discordant = 0;
  bool no_discordant_pairs = true;
};

// Survival function of the chi-square distribution with one degree of freedom.
inline double chi2_1df_survival(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

// Continuity-corrected statistic (max(|b-c|-1, 0))^2 / (b+c). With no
// discordant pairs the statistic is 0 and p is 1.
inline McNemarResult mcnemar_from_counts(std::size_t b, std::size_t c) {
  McNemarResult r;
  r.b = b;
  r.c = c;
  r.n_discordant = b + c;
  r.no_discordant_pairs = r.n_discordant == 0;
  if (r.no_discordant_pairs) return r;
  const double diff = std::fabs(static_cast<double>(b) - static_cast<double>(c));
  const double corrected = std::max(diff - 1.0, 0.0);
  r.statistic = corrected * corrected / static_cast<double>(r.n_discordant);
  r.p_value = chi2_1df_survival(r.statistic);
  return r;
}

inline McNemarResult mcnemar(const std::vector<bool>& correct_a,
                             const std::vector<bool>& correct_b) {
  if (correct_a.size() != correct_b.size()) {
    throw LengthMismatch(correct_a.size(), correct_b.size());
  }
  std::size_t b = 0;
  std::size_t c = 0;
  for (std::size_t i = 0; i < correct_a.size(); ++i) {
    b += correct_a[i] && !correct_b[i];
    c += !correct_a[i] && correct_b[i];
  }
  return mcnemar_from_counts(b, c);
}

// ---- bootstrap ----------------------------------------------------------------

inline constexpr std::size_t kDefaultReplicates = 2000;
inline constexpr std::uint64_t kDefaultBootstrapSeed = 42;
inline constexpr std::string_view kBootstrapRng = "splitmix64";

struct BootstrapCi {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t replicates = kDefaultReplicates;
  std::uint64_t seed = kDefaultBootstrapSeed;
  double level = 0.95;
  std::string rng_algorithm{kBootstrapRng};

  double half_width() const { return (upper - lower) / 2.0; }
};

// Seed of replicate r's private stream, so replicates can run in any order.
constexpr std::uint64_t replicate_seed(std::uint64_t seed, std::size_t r) {
  return SplitMix64::mix(SplitMix64::mix(seed) + 0x9E3779B97F4A7C15ull * (r + 1));
}

// Linear-interpolation quantile of sorted values (the "type 7" definition).
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw EmptyInput("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Percentile bootstrap CI of accuracy. Each replicate resamples n indices
// with replacement from its own SplitMix64 stream. The bounds are widened
// to include the point estimate when resampling skews them past it.
inline BootstrapCi bootstrap_ci(const std::vector<bool>& correct,
                                std::size_t replicates = kDefaultReplicates,
                                std::uint64_t seed = kDefaultBootstrapSeed,
                                double level = 0.95, std::size_t jobs = 1) {
  if (correct.empty()) throw EmptyInput("bootstrap of an empty vector");
  if (replicates == 0) throw Error("bootstrap needs at least one replicate");
  const std::vector<std::uint8_t> values(correct.begin(), correct.end());
  const std::size_t n = values.size();

  std::vector<double> stats(replicates);
  parallel_for(replicates, jobs, [&](std::size_t r) {
    SplitMix64 rng(replicate_seed(seed, r));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += values[rng.below(n)];
    stats[r] = static_cast<double>(hits) / static_cast<double>(n);
  });
  std::sort(stats.begin(), stats.end());

  BootstrapCi ci;
  ci.point = accuracy(correct);
  ci.replicates = replicates;
  ci.seed = seed;
  ci.level = level;
  const double tail = (1.0 - level) / 2.0;
  ci.lower = std::min(sorted_quantile(stats, tail), ci.point);
  ci.upper = std::max(sorted_quantile(stats, 1.0 - tail), ci.point);
  return ci;
}

// ---- Bonferroni -----------------------------------------------------------------

struct BonferroniFamily {
  std::string family_name;
  std::size_t m = 1;
  double alpha = 0.05;

  double threshold() const {
    if (m == 0) throw Error("a Bonferroni family needs at least one test");
    return alpha / static_cast<double>(m);
  }
  bool significant(double p) const { return p < threshold(); }
};

struct Verdict {
  std::string name;
  McNemarResult result;
  bool significant = false;
};

struct FamilyVerdicts {
  std::string family_name;
  std::size_t m = 0;
  double alpha = 0.05;
  double threshold = 0.0;
  std::vector<Verdict> verdicts;
};

inline FamilyVerdicts compare_family(
    const std::vector<std::pair<std::string, McNemarResult>>& tests,
    const BonferroniFamily& family) {
  FamilyVerdicts out{family.family_name, family.m, family.alpha, family.threshold(), {}};
  for (const auto& [name, r] : tests) {
    out.verdicts.push_back({name, r, r.p_value < out.threshold});
  }
  return out;
}

inline nlohmann::ordered_json to_json(const McNemarResult& r) {
  nlohmann::ordered_json j;
  j["b"] = r.b;
  j["c"] = r.c;
  j["n_discordant"] = r.n_discordant;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["no_discordant_pairs"] = r.no_discordant_pairs;
  return j;
}

inline nlohmann::ordered_json to_json(const BootstrapCi& ci) {
  nlohmann::ordered_json j;
  j["point"] = ci.point;
  j["lower"] = ci.lower;
  j["upper"] = ci.upper;
  j["half_width"] = ci.half_width();
  j["level"] = ci.level;
  j["replicates"] = ci.replicates;
  j["seed"] = ci.seed;
  j["rng"] = ci.rng_algorithm;
  return j;
}

}  // namespace nlirobust
