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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlirobust/corpus.hpp"
#include "nlirobust/parallel.hpp"
#include "nlirobust/transforms.hpp"

namespace nlirobust {

struct VariantData {
  Variant variant = Variant::kOriginal;
  std::vector<NliExample> examples;
  std::vector<TransformTrace> traces;
};

// Transforms every example; output order equals input order for any job count.
inline VariantData generate_variant(const std::vector<NliExample>& examples,
                                    Variant variant, std::uint64_t seed,
                                    const TransformEngine& engine,
                                    std::size_t jobs = 1) {
  VariantData out;
  out.variant = variant;
  out.examples.resize(examples.size());
  out.traces.resize(examples.size());
  parallel_for(examples.size(), jobs, [&](std::size_t i) {
    TransformOutput t = engine.apply(examples[i], variant, seed);
    out.examples[i] = std::move(t.example);
    out.traces[i] = std::move(t.trace);
  });
  return out;
}

// ---- trace files -----------------------------------------------------------

inline nlohmann::ordered_json to_json(const TransformTrace& t) {
  nlohmann::ordered_json j;
  j["id"] = t.example_id;
  j["variant"] = t.variant_name;
  j["words_replaced"] = t.words_replaced_count;
  auto& reps = j["replacements"] = nlohmann::ordered_json::array();
  for (const auto& r : t.replacements) {
    nlohmann::ordered_json rj;
    rj["field"] = field_name(r.field);
    rj["start"] = r.span_start;
    rj["end"] = r.span_end;
    rj["original"] = r.original_text;
    rj["replacement"] = r.replacement_text;
    rj["kind"] = kind_name(r.kind);
    reps.push_back(std::move(rj));
  }
  return j;
}

inline TransformTrace trace_from_json(const nlohmann::json& j) {
  TransformTrace t;
  t.example_id = j.at("id").get<std::string>();
  t.variant_name = j.at("variant").get<std::string>();
  t.words_replaced_count = j.at("words_replaced").get<std::size_t>();
  for (const auto& rj : j.at("replacements")) {
    Replacement r;
    const auto field = rj.at("field").get<std::string>();
    if (field != "premise" && field != "hypothesis") {
      throw Error("unknown trace field '" + field + "'");
    }
    r.field = field == "premise" ? Field::kPremise : Field::kHypothesis;
    r.span_start = rj.at("start").get<std::size_t>();
    r.span_end = rj.at("end").get<std::size_t>();
    r.original_text = rj.at("original").get<std::string>();
    r.replacement_text = rj.at("replacement").get<std::string>();
    const auto kind = rj.at("kind").get<std::string>();
    if (kind == "slang") {
      r.kind = ReplacementKind::kSlang;
    } else if (kind == "emoji") {
      r.kind = ReplacementKind::kEmoji;
    } else if (kind == "noise") {
      r.kind = ReplacementKind::kNoise;
    } else {
      throw Error("unknown replacement kind '" + kind + "'");
    }
    t.replacements.push_back(std::move(r));
  }
  return t;
}

inline std::string serialize_traces(const std::vector<TransformTrace>& traces) {
  std::string out;
  for (const auto& t : traces) {
    out += to_json(t).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<TransformTrace> load_traces(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TransformTrace> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(trace_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw MalformedRecord(line_no, ex.what());
    }
  }
  return out;
}

// ---- manifest --------------------------------------------------------------

struct VariantEntry {
  std::string variant_name;
  std::string file_path;
  std::size_t example_count = 0;
  std::string content_digest;

  friend bool operator==(const VariantEntry&, const VariantEntry&) = default;
};

struct VariantManifest {
  std::string source_dataset;
  std::uint64_t seed = 0;
  std::vector<VariantEntry> variants;

  const VariantEntry* find(std::string_view name) const {
    for (const auto& v : variants) {
      if (v.variant_name == name) return &v;
    }
    return nullptr;
  }

  friend bool operator==(const VariantManifest&, const VariantManifest&) = default;
};

inline nlohmann::ordered_json to_json(const VariantManifest& m) {
  nlohmann::ordered_json j;
  j["source_dataset"] = m.source_dataset;
  j["seed"] = m.seed;
  auto& vs = j["variants"] = nlohmann::ordered_json::array();
  for (const auto& v : m.variants) {
    vs.push_back({{"variant_name", v.variant_name},
                  {"file_path", v.file_path},
                  {"example_count", v.example_count},
                  {"content_digest", v.content_digest}});
  }
  return j;
}

inline VariantManifest manifest_from_json(const nlohmann::json& j) {
  VariantManifest m;
  m.source_dataset = j.at("source_dataset").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& v : j.at("variants")) {
    m.variants.push_back({v.at("variant_name").get<std::string>(),
                          v.at("file_path").get<std::string>(),
                          v.at("example_count").get<std::size_t>(),
                          v.at("content_digest").get<std::string>()});
  }
  return m;
}

inline VariantManifest load_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedRecord(1, std::string("manifest: ") + ex.what());
  }
}

inline std::filesystem::path variant_file_name(std::string_view dataset,
                                               Variant v) {
  return std::string(dataset) + "." + std::string(variant_name(v)) + ".jsonl";
}

inline std::filesystem::path trace_file_name(std::string_view dataset, Variant v) {
  return std::string(dataset) + "." + std::string(variant_name(v)) + ".trace.jsonl";
}

inline std::filesystem::path manifest_file_name(std::string_view dataset) {
  return std::string(dataset) + ".manifest.json";
}

// Generates and writes the five evaluation variants, their trace files and
// the manifest into out_dir. File paths in the manifest are relative to
// out_dir.
inline VariantManifest build_eval_variants(const std::vector<NliExample>& examples,
                                           std::uint64_t seed,
                                           const TransformEngine& engine,
                                           const std::filesystem::path& out_dir,
                                           std::string_view dataset_name,
                                           std::size_t jobs = 1) {
  if (examples.empty()) throw EmptyInput("cannot build variants of an empty dataset");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  VariantManifest manifest{std::string(dataset_name), seed, {}};
  for (Variant v : kVariants) {
    VariantData data = generate_variant(examples, v, seed, engine, jobs);
    const std::string body = serialize_jsonl(data.examples);
    const auto file = variant_file_name(dataset_name, v);
    write_text_file(out_dir / file, body);
    if (v != Variant::kOriginal) {
      write_text_file(out_dir / trace_file_name(dataset_name, v),
                      serialize_traces(data.traces));
    }
    manifest.variants.push_back({std::string(variant_name(v)), file.string(),
                                 data.examples.size(), sha256_hex(body)});
  }
  write_text_file(out_dir / manifest_file_name(dataset_name),
                  to_json(manifest).dump(2) + "\n");
  return manifest;
}

// Checks the manifest invariants against the files on disk: all five variants
// exactly once, equal counts, identical id order and matching digests.
inline void validate_manifest(const VariantManifest& m,
                              const std::filesystem::path& base_dir) {
  for (Variant v : kVariants) {
    std::size_t seen = 0;
    for (const auto& e : m.variants) seen += e.variant_name == variant_name(v);
    if (seen != 1) {
      throw Error("manifest must list variant '" + std::string(variant_name(v)) +
                  "' exactly once");
    }
  }
  if (m.variants.size() != kVariants.size()) {
    throw Error("manifest lists unexpected variants");
  }
  std::vector<std::string> reference_ids;
  for (const auto& e : m.variants) {
    const std::string body = read_text_file(base_dir / e.file_path);
    if (sha256_hex(body) != e.content_digest) {
      throw Error("digest mismatch for " + e.file_path);
    }
    std::istringstream in(body);
    const auto loaded = parse_dataset(in).examples;
    if (loaded.size() != e.example_count) {
      throw Error("example count mismatch for " + e.file_path);
    }
    std::vector<std::string> ids;
    for (const auto& ex : loaded) ids.push_back(ex.id);
    if (reference_ids.empty()) {
      reference_ids = std::move(ids);
    } else if (ids != reference_ids) {
      throw AlignmentError("variant " + e.variant_name +
                           " is not aligned with the other variants");
    }
  }
}

}  // namespace nlirobust
