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

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "nlirobust/lexicon.hpp"
#include "nlirobust/transforms.hpp"

namespace nlirobust::testing {

inline std::filesystem::path data_dir() { return NLIROBUST_DEFAULT_DATA_DIR; }

inline const Lexicons& lexicons() {
  static const Lexicons lex = Lexicons::load(data_dir());
  return lex;
}

inline const TransformEngine& engine() {
  static const TransformEngine e(lexicons());
  return e;
}

inline std::string emoji(std::string_view word) {
  const std::string* e = lexicons().emoji.emoji_for_word(word);
  return e ? *e : std::string("<no emoji for ") + std::string(word) + ">";
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("nlirobust-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace nlirobust::testing
