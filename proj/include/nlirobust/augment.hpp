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
#include <optional>
#include <string>
#include <vector>

#include "nlirobust/corpus.hpp"
#include "nlirobust/parallel.hpp"
#include "nlirobust/rng.hpp"
#include "nlirobust/transforms.hpp"

namespace nlirobust {

inline constexpr double kAugmentCopyProbability = 0.5;
inline constexpr std::string_view kAugmentStream = "augment";

// Copy decision and transformed copy for one example, or nullopt when the
// example is not copied. Pure in (example, seed).
inline std::optional<NliExample> augment_copy(const NliExample& example, std::uint64_t seed,
                                              const TransformEngine& engine) {
  SplitMix64 rng(derive_seed(seed, example.id, kAugmentStream));
  if (rng.uniform() >= kAugmentCopyProbability) return std::nullopt;
  const Variant transform = kTransformVariants[rng.below(kTransformVariants.size())];
  TransformOutput t = engine.apply_with(example, transform, rng);
  NliExample copy = std::move(t.example);
  copy.id = copy.content_id();
  copy.source_id = example.id;
  copy.transform = std::string(variant_name(transform));
  return copy;
}

// All originals in input order, followed by the transformed copies in the
// order of their sources. Copies that no lexicon touched are kept as exact
// duplicates of their source text.
inline std::vector<NliExample> augment_dataset(const std::vector<NliExample>& examples,
                                               std::uint64_t seed,
                                               const TransformEngine& engine,
                                               std::size_t jobs = 1) {
  std::vector<std::optional<NliExample>> copies(examples.size());
  parallel_for(examples.size(), jobs, [&](std::size_t i) {
    copies[i] = augment_copy(examples[i], seed, engine);
  });
  std::vector<NliExample> out = examples;
  for (auto& c : copies) {
    if (c) out.push_back(std::move(*c));
  }
  return out;
}

}  // namespace nlirobust
