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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlirobust {

// Root of every error the toolkit raises. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line_no, const std::string& what)
      : Error("malformed record at line " + std::to_string(line_no) + ": " +
              what),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class UnknownLabel : public Error {
 public:
  UnknownLabel(std::size_t line_no, std::string value)
      : Error("unknown label '" + value + "' at line " +
              std::to_string(line_no)),
        line_no_(line_no),
        value_(std::move(value)) {}
  std::size_t line_no() const { return line_no_; }
  const std::string& value() const { return value_; }

 private:
  std::size_t line_no_;
  std::string value_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  AlignmentError(std::vector<std::string> missing, std::vector<std::string> extra,
                 const std::string& context = {})
      : Error(Describe(missing, extra, context)),
        missing_(std::move(missing)),
        extra_(std::move(extra)) {}
  explicit AlignmentError(const std::string& what) : Error(what) {}

  const std::vector<std::string>& missing() const { return missing_; }
  const std::vector<std::string>& extra() const { return extra_; }

 private:
  static std::string Describe(const std::vector<std::string>& missing,
                              const std::vector<std::string>& extra,
                              const std::string& context) {
    std::string msg = "alignment error";
    if (!context.empty()) msg += " (" + context + ")";
    auto list = [](const std::vector<std::string>& ids) {
      std::string out;
      const std::size_t shown = std::min<std::size_t>(ids.size(), 5);
      for (std::size_t i = 0; i < shown; ++i) {
        if (i) out += ", ";
        out += ids[i];
      }
      if (ids.size() > shown) {
        out += ", ... (" + std::to_string(ids.size()) + " total)";
      }
      return out;
    };
    if (!missing.empty()) msg += "; missing ids: " + list(missing);
    if (!extra.empty()) msg += "; extra ids: " + list(extra);
    return msg;
  }

  std::vector<std::string> missing_;
  std::vector<std::string> extra_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(const std::string& id)
      : Error("duplicate example id " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what = "empty input") : Error(what) {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

class MissingCell : public Error {
 public:
  explicit MissingCell(std::vector<std::pair<std::string, std::string>> cells)
      : Error(Describe(cells)), cells_(std::move(cells)) {}
  const std::vector<std::pair<std::string, std::string>>& cells() const {
    return cells_;
  }

 private:
  static std::string Describe(
      const std::vector<std::pair<std::string, std::string>>& cells) {
    std::string msg = "missing prediction files for";
    for (const auto& [approach, variant] : cells) {
      msg += " (" + approach + ", " + variant + ")";
    }
    return msg;
  }
  std::vector<std::pair<std::string, std::string>> cells_;
};

class LexiconError : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

class RateLimited : public Error {
 public:
  explicit RateLimited(const std::string& what, double retry_after_seconds = -1.0)
      : Error(what), retry_after_(retry_after_seconds) {}
  // Negative when the server gave no Retry-After hint.
  double retry_after_seconds() const { return retry_after_; }

 private:
  double retry_after_;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlirobust
