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
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlirobust/corpus.hpp"
#include "nlirobust/error.hpp"
#include "nlirobust/stats.hpp"
#include "nlirobust/transforms.hpp"
#include "nlirobust/unicode.hpp"

namespace nlirobust {

// Column 3 of the count matrix holds invalid predictions.
inline constexpr std::size_t kInvalidColumn = 3;

struct ConfusionTable {
  std::array<std::array<std::size_t, 4>, 3> counts{};
  std::size_t n_examples = 0;

  std::size_t row_total(Label truth) const {
    const auto& row = counts[label_index(truth)];
    return row[0] + row[1] + row[2] + row[3];
  }

  // Full-precision row percentage; 0 for an empty row.
  double percent(Label truth, std::size_t column) const {
    const std::size_t total = row_total(truth);
    if (total == 0) return 0.0;
    return 100.0 * static_cast<double>(counts[label_index(truth)][column]) /
           static_cast<double>(total);
  }
  double percent(Label truth, Label predicted) const {
    return percent(truth, label_index(predicted));
  }

  bool has_invalid() const {
    return std::any_of(counts.begin(), counts.end(),
                       [](const auto& row) { return row[kInvalidColumn] > 0; });
  }

  // Integer percentages by largest remainder, so each non-empty row sums to 100.
  std::array<int, 4> rounded_row(Label truth) const {
    std::array<int, 4> out{};
    const std::size_t total = row_total(truth);
    if (total == 0) return out;
    std::array<double, 4> rem{};
    int used = 0;
    for (std::size_t c = 0; c < 4; ++c) {
      const double p = percent(truth, c);
      out[c] = static_cast<int>(std::floor(p));
      rem[c] = p - out[c];
      used += out[c];
    }
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; used < 100 && k < 4; ++k, ++used) ++out[order[k]];
    return out;
  }

  // Class-frequency-weighted mean of the diagonal, as a proportion.
  double weighted_diagonal() const {
    if (n_examples == 0) throw EmptyInput("empty confusion table");
    double sum = 0.0;
    for (Label l : kLabels) {
      sum += static_cast<double>(row_total(l)) / static_cast<double>(n_examples) *
             percent(l, l) / 100.0;
    }
    return sum;
  }
};

inline ConfusionTable confusion(const std::vector<NliExample>& gold, const PredictionFile& preds) {
  const ScoredPredictions s = score(preds, gold);
  ConfusionTable t;
  t.n_examples = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::size_t col = s.predicted[i] ? label_index(*s.predicted[i]) : kInvalidColumn;
    ++t.counts[label_index(gold[i].gold_label)][col];
  }
  return t;
}

using TransitionKey = std::pair<Label, Prediction>;

struct TransitionLess {
  bool operator()(const TransitionKey& a, const TransitionKey& b) const {
    auto rank = [](const Prediction& p) { return p ? label_index(*p) : kInvalidColumn; };
    if (a.first != b.first) return label_index(a.first) < label_index(b.first);
    return rank(a.second) < rank(b.second);
  }
};

using TransitionCounts = std::map<TransitionKey, std::size_t, TransitionLess>;

namespace detail {
inline TransitionCounts count_errors(const std::vector<NliExample>& gold,
                                     const ScoredPredictions& s) {
  TransitionCounts out;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!s.correct[i]) ++out[{gold[i].gold_label, s.predicted[i]}];
  }
  return out;
}
}  // namespace detail

// (true, predicted) counts over misclassified examples only.
inline TransitionCounts transition_counts(const std::vector<NliExample>& gold,
                                          const PredictionFile& preds) {
  return detail::count_errors(gold, score(preds, gold));
}

// Derived label-collapse signal: the share of errors whose prediction is
// neutral. nullopt when there are no errors.
inline std::optional<double> neutral_error_share(const TransitionCounts& t) {
  std::size_t errors = 0;
  std::size_t neutral = 0;
  for (const auto& [key, n] : t) {
    errors += n;
    if (key.second == Label::kNeutral) neutral += n;
  }
  if (errors == 0) return std::nullopt;
  return static_cast<double>(neutral) / static_cast<double>(errors);
}

struct RecoveryAnalysis {
  std::size_t n_examples = 0;
  std::size_t recovered = 0;
  std::size_t regressed = 0;
  std::optional<double> ratio;  // nullopt when regressed == 0
  TransitionCounts transitions;  // baseline errors
  std::vector<std::string> recovered_ids;

  bool ratio_undefined() const { return !ratio; }
};

inline RecoveryAnalysis recovery(const std::vector<NliExample>& gold,
                                 const PredictionFile& baseline,
                                 const PredictionFile& mitigated) {
  const ScoredPredictions base = score(baseline, gold);
  const ScoredPredictions mit = score(mitigated, gold);
  RecoveryAnalysis r;
  r.n_examples = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!base.correct[i] && mit.correct[i]) {
      ++r.recovered;
      r.recovered_ids.push_back(gold[i].id);
    } else if (base.correct[i] && !mit.correct[i]) {
      ++r.regressed;
    }
  }
  if (r.regressed > 0) {
    r.ratio = static_cast<double>(r.recovered) / static_cast<double>(r.regressed);
  }
  r.transitions = detail::count_errors(gold, base);
  return r;
}

inline std::string prediction_abbrev(const Prediction& p) {
  return p ? std::string(label_abbrev(*p)) : "INV";
}

inline nlohmann::ordered_json to_json(const TransitionCounts& t) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [key, n] : t) {
    nlohmann::ordered_json j;
    j["true"] = label_name(key.first);
    j["predicted"] = prediction_name(key.second);
    j["count"] = n;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline nlohmann::ordered_json to_json(const RecoveryAnalysis& r) {
  nlohmann::ordered_json j;
  j["n_examples"] = r.n_examples;
  j["recovered"] = r.recovered;
  j["regressed"] = r.regressed;
  j["ratio"] = r.ratio ? nlohmann::ordered_json(*r.ratio) : nlohmann::ordered_json(nullptr);
  j["ratio_undefined"] = r.ratio_undefined();
  j["baseline_error_transitions"] = to_json(r.transitions);
  j["recovered_ids"] = r.recovered_ids;
  return j;
}

inline nlohmann::ordered_json to_json(const ConfusionTable& t) {
  nlohmann::ordered_json j;
  j["n_examples"] = t.n_examples;
  nlohmann::ordered_json rows;
  for (Label truth : kLabels) {
    nlohmann::ordered_json row;
    for (Label p : kLabels) row[std::string(label_name(p))] = t.percent(truth, p);
    row["invalid"] = t.percent(truth, kInvalidColumn);
    row["n"] = t.row_total(truth);
    rows[std::string(label_name(truth))] = std::move(row);
  }
  j["rows"] = std::move(rows);
  return j;
}

// Plain-text table with integer percentages.
inline std::string render_confusion(const ConfusionTable& t) {
  std::ostringstream out;
  const bool inv = t.has_invalid();
  out << std::left << std::setw(6) << "true";
  for (Label p : kLabels) out << std::right << std::setw(6) << label_abbrev(p);
  if (inv) out << std::setw(6) << "INV";
  out << std::setw(8) << "n" << '\n';
  for (Label truth : kLabels) {
    const auto row = t.rounded_row(truth);
    out << std::left << std::setw(6) << label_abbrev(truth) << std::right;
    for (std::size_t c = 0; c < 3; ++c) out << std::setw(6) << row[c];
    if (inv) out << std::setw(6) << row[kInvalidColumn];
    out << std::setw(8) << t.row_total(truth) << '\n';
  }
  return out.str();
}

// ---- accuracy table -------------------------------------------------------------

inline constexpr std::string_view variant_column(Variant v) {
  switch (v) {
    case Variant::kOriginal: return "Orig.";
    case Variant::kSlang: return "Slang";
    case Variant::kEmoji: return "Emoji";
    case Variant::kNoise: return "Noise";
    case Variant::kCombined: return "Comb.";
  }
  return "?";
}

struct AccuracyCell {
  double accuracy = 0.0;
  std::optional<double> half_width;
  std::size_t n = 0;
  std::size_t invalid = 0;
};

struct AccuracyTable {
  std::vector<std::string> approaches;
  std::vector<std::vector<AccuracyCell>> cells;  // [approach][variant]

  const AccuracyCell& at(std::size_t approach, Variant v) const {
    return cells.at(approach).at(static_cast<std::size_t>(v));
  }
};

struct MarginOptions {
  bool enabled = false;
  std::size_t replicates = kDefaultReplicates;
  std::uint64_t seed = kDefaultBootstrapSeed;
  double level = 0.95;
  std::size_t jobs = 1;
};

using GoldVariants = std::map<Variant, std::vector<NliExample>>;
using PredictionGrid = std::map<std::pair<std::string, Variant>, PredictionFile>;

// One row per approach (in the given order), one column per variant.
inline AccuracyTable accuracy_table(const GoldVariants& gold,
                                    const PredictionGrid& preds,
                                    const std::vector<std::string>& approaches,
                                    const MarginOptions& margins = {}) {
  std::vector<std::pair<std::string, std::string>> missing;
  for (const auto& a : approaches) {
    for (Variant v : kVariants) {
      if (!gold.contains(v) || !preds.contains({a, v})) {
        missing.emplace_back(a, std::string(variant_name(v)));
      }
    }
  }
  if (!missing.empty()) throw MissingCell(std::move(missing));

  AccuracyTable t;
  t.approaches = approaches;
  for (const auto& a : approaches) {
    std::vector<AccuracyCell> row;
    for (Variant v : kVariants) {
      const ScoredPredictions s = score(preds.at({a, v}), gold.at(v));
      AccuracyCell cell;
      cell.accuracy = accuracy(s.correct);
      cell.n = s.correct.size();
      cell.invalid = s.invalid;
      if (margins.enabled) {
        cell.half_width = bootstrap_ci(s.correct, margins.replicates, margins.seed,
                                       margins.level, margins.jobs)
                              .half_width();
      }
      row.push_back(cell);
    }
    t.cells.push_back(std::move(row));
  }
  return t;
}

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string full_precision(double x) {
  std::ostringstream o;
  o << std::setprecision(17) << x;
  return o.str();
}
}  // namespace detail

// Accuracies in percent at full precision; margins get their own columns.
inline std::string to_csv(const AccuracyTable& t) {
  std::ostringstream out;
  out << "approach";
  const bool margins = !t.cells.empty() && t.cells.front().front().half_width.has_value();
  for (Variant v : kVariants) {
    out << ',' << variant_column(v);
    if (margins) out << ',' << variant_column(v) << " +/-";
  }
  out << '\n';
  for (std::size_t a = 0; a < t.approaches.size(); ++a) {
    out << detail::csv_field(t.approaches[a]);
    for (Variant v : kVariants) {
      const auto& c = t.at(a, v);
      out << ',' << detail::full_precision(100.0 * c.accuracy);
      if (margins) out << ',' << detail::full_precision(100.0 * c.half_width.value_or(0.0));
    }
    out << '\n';
  }
  return out.str();
}

inline std::string to_text(const AccuracyTable& t) {
  std::size_t name_w = 8;
  for (const auto& a : t.approaches) name_w = std::max(name_w, a.size());
  std::vector<std::vector<std::string>> rendered;
  std::size_t cell_w = 6;
  for (std::size_t a = 0; a < t.approaches.size(); ++a) {
    std::vector<std::string> row;
    for (Variant v : kVariants) {
      const auto& c = t.at(a, v);
      std::ostringstream o;
      o << std::fixed << std::setprecision(2) << 100.0 * c.accuracy;
      if (c.half_width) o << " ±" << std::setprecision(2) << 100.0 * *c.half_width;
      row.push_back(o.str());
      cell_w = std::max(cell_w, unicode::codepoints(row.back()).size());
    }
    rendered.push_back(std::move(row));
  }
  auto pad = [](const std::string& s, std::size_t w) {
    const std::size_t len = unicode::codepoints(s).size();
    return std::string(w > len ? w - len : 0, ' ') + s;
  };
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_w)) << "approach";
  for (Variant v : kVariants) out << "  " << pad(std::string(variant_column(v)), cell_w);
  out << '\n';
  for (std::size_t a = 0; a < t.approaches.size(); ++a) {
    out << std::left << std::setw(static_cast<int>(name_w)) << t.approaches[a];
    for (const auto& s : rendered[a]) out << "  " << pad(s, cell_w);
    out << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const AccuracyTable& t) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < t.approaches.size(); ++a) {
    nlohmann::ordered_json row;
    row["approach"] = t.approaches[a];
    for (Variant v : kVariants) {
      const auto& c = t.at(a, v);
      nlohmann::ordered_json cell;
      cell["accuracy"] = c.accuracy;
      if (c.half_width) cell["half_width"] = *c.half_width;
      cell["n"] = c.n;
      cell["invalid"] = c.invalid;
      row[std::string(variant_name(v))] = std::move(cell);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace nlirobust
