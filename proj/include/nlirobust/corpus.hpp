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

#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlirobust/digest.hpp"
#include "nlirobust/error.hpp"
#include "nlirobust/unicode.hpp"

namespace nlirobust {

enum class Label { kEntailment, kNeutral, kContradiction };

inline constexpr std::array<Label, 3> kLabels = {
    Label::kEntailment, Label::kNeutral, Label::kContradiction};

inline constexpr std::string_view label_name(Label l) {
  switch (l) {
    case Label::kEntailment:
      return "entailment";
    case Label::kNeutral:
      return "neutral";
    case Label::kContradiction:
      return "contradiction";
  }
  return "";
}

inline constexpr std::string_view label_abbrev(Label l) {
  switch (l) {
    case Label::kEntailment:
      return "ENT";
    case Label::kNeutral:
      return "NEU";
    case Label::kContradiction:
      return "CON";
  }
  return "";
}

inline constexpr std::size_t label_index(Label l) {
  return static_cast<std::size_t>(l);
}

inline std::optional<Label> parse_label_name(std::string_view s) {
  for (Label l : kLabels) {
    if (label_name(l) == s) return l;
  }
  return std::nullopt;
}

// 16 bytes of SHA-256 over premise 0x1F hypothesis 0x1F label, lowercase hex.
inline std::string example_id(std::string_view premise,
                              std::string_view hypothesis, Label gold) {
  const std::array<std::string_view, 3> fields = {premise, hypothesis,
                                                  label_name(gold)};
  return field_digest(fields, 16);
}

inline bool is_example_id(std::string_view s) {
  if (s.size() != 32) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

namespace detail {
inline bool blank(std::string_view s) {
  bool any = false;
  unicode::for_each_codepoint(s, [&](char32_t c, std::size_t, std::size_t) {
    any = any || !unicode::is_whitespace(c);
  });
  return !any;
}
}  // namespace detail

struct NliExample {
  std::string id;
  std::string premise;
  std::string hypothesis;
  Label gold_label = Label::kNeutral;
  // Set on augmented copies only.
  std::optional<std::string> source_id;
  std::optional<std::string> transform;

  // Builds an example whose id is derived from its content.
  static NliExample make(std::string premise, std::string hypothesis,
                         Label gold) {
    if (detail::blank(premise) || detail::blank(hypothesis)) {
      throw Error("premise and hypothesis must be non-empty");
    }
    NliExample e;
    e.id = example_id(premise, hypothesis, gold);
    e.premise = std::move(premise);
    e.hypothesis = std::move(hypothesis);
    e.gold_label = gold;
    return e;
  }

  std::string content_id() const {
    return example_id(premise, hypothesis, gold_label);
  }

  friend bool operator==(const NliExample&, const NliExample&) = default;
};

struct LoadResult {
  std::vector<NliExample> examples;
  std::size_t dropped_unlabeled = 0;
};

inline nlohmann::ordered_json to_json(const NliExample& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["premise"] = e.premise;
  j["hypothesis"] = e.hypothesis;
  j["label"] = label_name(e.gold_label);
  if (e.source_id) j["source_id"] = *e.source_id;
  if (e.transform) j["transform"] = *e.transform;
  return j;
}

namespace detail {

inline const nlohmann::json* find_field(const nlohmann::json& j,
                                        std::string_view primary,
                                        std::string_view alternate) {
  if (auto it = j.find(primary); it != j.end()) return &*it;
  if (auto it = j.find(alternate); it != j.end()) return &*it;
  return nullptr;
}

inline std::string string_field(const nlohmann::json& j,
                                std::string_view primary,
                                std::string_view alternate,
                                std::size_t line_no) {
  const nlohmann::json* v = find_field(j, primary, alternate);
  if (v == nullptr || !v->is_string()) {
    throw MalformedRecord(line_no,
                          "missing string field '" + std::string(primary) + "'");
  }
  return v->get<std::string>();
}

}  // namespace detail

// Parses one JSONL record. Returns nullopt for unannotated ("-") pairs.
// Accepts premise/hypothesis/label and the SNLI names
// sentence1/sentence2/gold_label. An explicit "id" field is kept verbatim so
// transformed variants stay paired with their source example.
inline std::optional<NliExample> parse_record(std::string_view line,
                                              std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedRecord(line_no, ex.what());
  }
  if (!j.is_object()) throw MalformedRecord(line_no, "record is not an object");

  std::string premise = detail::string_field(j, "premise", "sentence1", line_no);
  std::string hypothesis =
      detail::string_field(j, "hypothesis", "sentence2", line_no);
  const std::string label = detail::string_field(j, "label", "gold_label", line_no);

  if (label == "-") return std::nullopt;
  const auto gold = parse_label_name(label);
  if (!gold) throw UnknownLabel(line_no, label);
  if (detail::blank(premise) || detail::blank(hypothesis)) {
    throw MalformedRecord(line_no, "empty premise or hypothesis");
  }

  NliExample e;
  e.premise = std::move(premise);
  e.hypothesis = std::move(hypothesis);
  e.gold_label = *gold;
  if (auto it = j.find("id"); it != j.end()) {
    if (!it->is_string() || !is_example_id(it->get<std::string>())) {
      throw MalformedRecord(line_no, "id must be 32 lowercase hex digits");
    }
    e.id = it->get<std::string>();
  } else {
    e.id = e.content_id();
  }
  if (auto it = j.find("source_id"); it != j.end() && it->is_string()) {
    e.source_id = it->get<std::string>();
  }
  if (auto it = j.find("transform"); it != j.end() && it->is_string()) {
    e.transform = it->get<std::string>();
  }
  return e;
}

inline LoadResult parse_dataset(std::istream& in) {
  LoadResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (auto e = parse_record(line, line_no)) {
      out.examples.push_back(std::move(*e));
    } else {
      ++out.dropped_unlabeled;
    }
  }
  return out;
}

inline LoadResult load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_dataset(in);
}

inline std::string serialize_jsonl(const std::vector<NliExample>& examples) {
  std::string out;
  for (const auto& e : examples) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_dataset(const std::filesystem::path& path,
                          const std::vector<NliExample>& examples) {
  write_text_file(path, serialize_jsonl(examples));
}

// SHA-256 of the canonical JSONL serialisation.
inline std::string dataset_digest(const std::vector<NliExample>& examples) {
  return sha256_hex(serialize_jsonl(examples));
}

}  // namespace nlirobust
