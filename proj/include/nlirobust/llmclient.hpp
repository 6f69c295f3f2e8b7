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
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nlirobust/corpus.hpp"
#include "nlirobust/digest.hpp"
#include "nlirobust/error.hpp"
#include "nlirobust/parallel.hpp"
#include "nlirobust/stats.hpp"
#include "nlirobust/unicode.hpp"

namespace nlirobust {

inline constexpr std::string_view kSystemPrompt =
    "You are a natural language inference classifier. Given a premise and hypothesis, "
    "output exactly one word: entailment, neutral, or contradiction. No explanation.";

inline constexpr std::string_view kDefaultApiKeyEnv = "OPENAI_API_KEY";

struct LlmRequest {
  std::string model_name;
  std::string system_prompt{kSystemPrompt};
  std::string user_content;
  double temperature = 0.0;
};

// Newlines inside fields are kept verbatim.
inline std::string build_prompt(const NliExample& e) {
  std::string out;
  out.reserve(e.premise.size() + e.hypothesis.size() + 22);
  out += "Premise: ";
  out += e.premise;
  out += "\nHypothesis: ";
  out += e.hypothesis;
  return out;
}

inline LlmRequest make_request(const NliExample& e, std::string model_name) {
  LlmRequest r;
  r.model_name = std::move(model_name);
  r.user_content = build_prompt(e);
  return r;
}

// Trim, drop trailing punctuation, lowercase, then require an exact label
// name. Anything else is invalid (nullopt).
inline Prediction parse_label(std::string_view raw) {
  std::vector<char32_t> cps = unicode::codepoints(raw);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && unicode::is_whitespace(cps[b])) ++b;
  while (e > b && (unicode::is_whitespace(cps[e - 1]) || unicode::is_punctuation(cps[e - 1]))) {
    --e;
  }
  std::string word;
  for (std::size_t i = b; i < e; ++i) unicode::append_utf8(word, cps[i]);
  return parse_label_name(unicode::to_lower(word));
}

inline std::string cache_key(const LlmRequest& r) {
  const std::string_view fields[] = {r.model_name, r.system_prompt, r.user_content};
  return field_digest(fields);
}

struct CacheEntry {
  std::string key;
  std::string model_name;
  std::string raw_response;
  Prediction parsed_label;
  std::string timestamp;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Append-only JSONL cache keyed by request digest. A torn final line left by
// a crash is truncated away on load; the first record for a key wins.
class ResponseCache {
 public:
  ResponseCache() = default;

  explicit ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    ends_with_newline_ = body.empty() || body.back() == '\n';
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t nl = body.find('\n', pos);
      const bool last = nl == std::string::npos;
      if (last) nl = body.size();
      std::string_view line(body.data() + pos, nl - pos);
      const std::size_t line_start = pos;
      ++line_no;
      pos = nl + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        CacheEntry e;
        e.key = j.at("key").get<std::string>();
        e.model_name = j.value("model", "");
        e.raw_response = j.at("raw_response").get<std::string>();
        e.parsed_label = parse_label(e.raw_response);
        e.timestamp = j.value("timestamp", "");
        entries_.emplace(e.key, std::move(e));
      } catch (const nlohmann::json::exception& ex) {
        if (last) {
          // Drop the torn tail so later appends don't bury it mid-file.
          std::filesystem::resize_file(path_, line_start);
          ends_with_newline_ = true;
          break;
        }
        throw MalformedRecord(line_no, std::string("cache: ") + ex.what());
      }
    }
  }

  std::optional<CacheEntry> lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Records an entry and, when file-backed, appends and flushes it.
  void insert(const CacheEntry& e) {
    std::lock_guard lock(mu_);
    if (!entries_.emplace(e.key, e).second) return;
    if (path_.empty()) return;
    nlohmann::ordered_json j;
    j["key"] = e.key;
    j["model"] = e.model_name;
    j["raw_response"] = e.raw_response;
    j["parsed_label"] = prediction_name(e.parsed_label);
    j["timestamp"] = e.timestamp;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to cache " + path_.string());
    if (!ends_with_newline_) out << '\n';
    out << j.dump() << '\n';
    out.flush();
    if (!out) throw IoError("failed writing cache " + path_.string());
    ends_with_newline_ = true;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  std::filesystem::path path_;
  std::unordered_map<std::string, CacheEntry> entries_;
  bool ends_with_newline_ = true;
  mutable std::mutex mu_;
};

// One chat completion. Implementations throw NetworkError (retryable),
// RateLimited (retryable after a pause), AuthError, or Error.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const LlmRequest& request) = 0;
};

inline nlohmann::json chat_request_body(const LlmRequest& r) {
  return {
      {"model", r.model_name},
      {"temperature", r.temperature},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", r.system_prompt}},
                              {{"role", "user"}, {"content", r.user_content}}})},
  };
}

// OpenAI-compatible chat completion endpoint over HTTP(S).
class HttpChatTransport : public ChatTransport {
 public:
  struct Options {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string api_key_env{kDefaultApiKeyEnv};
    std::chrono::seconds timeout{60};
  };

  explicit HttpChatTransport(Options options) : options_(std::move(options)) {
    const char* key = std::getenv(options_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw AuthError("environment variable " + options_.api_key_env + " is not set");
    }
    api_key_ = key;
  }

  std::string complete(const LlmRequest& request) override {
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(options_.path, headers, chat_request_body(request).dump(),
                           "application/json");
    if (!res) {
      throw NetworkError("request to " + options_.base_url +
                         " failed: " + httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      throw AuthError("server rejected credentials (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429) {
      double retry_after = -1.0;
      if (res->has_header("Retry-After")) {
        try {
          retry_after = std::stod(res->get_header_value("Retry-After"));
        } catch (const std::exception&) {
        }
      }
      throw RateLimited("rate limited (HTTP 429)", retry_after);
    }
    if (status >= 500) throw NetworkError("server error (HTTP " + std::to_string(status) + ")");
    if (status != 200) throw Error("unexpected HTTP status " + std::to_string(status));
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw NetworkError(std::string("malformed completion response: ") + ex.what());
    }
  }

 private:
  Options options_;
  std::string api_key_;
};

struct RetryPolicy {
  std::size_t max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  // Replaced in tests to avoid real waiting.
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

struct RateLimit {
  std::size_t max_in_flight = 4;
  double requests_per_second = 0.0;  // 0 = unlimited
};

namespace detail {
// Spaces request starts at least 1/rps apart across all workers.
class RequestPacer {
 public:
  explicit RequestPacer(double rps) : rps_(rps) {}
  void wait() {
    if (rps_ <= 0.0) return;
    using clock = std::chrono::steady_clock;
    clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      const auto now = clock::now();
      slot = std::max(now, next_);
      next_ = slot + std::chrono::duration_cast<clock::duration>(
                         std::chrono::duration<double>(1.0 / rps_));
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  double rps_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};
}  // namespace detail

// Calls the transport with bounded exponential backoff on NetworkError and
// RateLimited. AuthError and other errors propagate at once.
inline std::string complete_with_retry(ChatTransport& transport, const LlmRequest& request,
                                       const RetryPolicy& policy) {
  auto backoff = policy.initial_backoff;
  for (std::size_t attempt = 1;; ++attempt) {
    std::chrono::milliseconds pause = backoff;
    try {
      return transport.complete(request);
    } catch (const RateLimited& ex) {
      if (attempt >= policy.max_attempts) throw;
      if (ex.retry_after_seconds() >= 0.0) {
        pause = std::chrono::milliseconds(
            static_cast<std::int64_t>(ex.retry_after_seconds() * 1000.0));
        pause = std::min(pause, std::chrono::milliseconds(60000));
      }
    } catch (const NetworkError&) {
      if (attempt >= policy.max_attempts) throw;
    }
    if (policy.sleep) policy.sleep(pause);
    backoff = std::min(backoff * 2, policy.max_backoff);
  }
}

struct ClassifyOptions {
  RateLimit rate_limit;
  RetryPolicy retry;
  std::string variant_name;
};

// One prediction per example, in input order. The cache is consulted before
// any request; identical requests in a batch share one call. Invalid parses
// keep the sentinel label and the raw response.
inline PredictionFile classify_batch(const std::vector<NliExample>& examples,
                                     const std::string& model_name, ResponseCache& cache,
                                     ChatTransport& transport,
                                     const ClassifyOptions& options = {}) {
  std::vector<LlmRequest> requests;
  std::vector<std::string> keys;
  requests.reserve(examples.size());
  for (const auto& e : examples) {
    requests.push_back(make_request(e, model_name));
    keys.push_back(cache_key(requests.back()));
  }

  std::vector<std::size_t> misses;
  std::unordered_map<std::string, std::size_t> pending;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (cache.lookup(keys[i])) {
      ++hits;
    } else if (pending.emplace(keys[i], i).second) {
      misses.push_back(i);
    }
  }

  detail::RequestPacer pacer(options.rate_limit.requests_per_second);
  std::atomic<std::size_t> calls{0};
  parallel_for(misses.size(), std::max<std::size_t>(1, options.rate_limit.max_in_flight),
               [&](std::size_t m) {
                 const std::size_t i = misses[m];
                 pacer.wait();
                 std::string raw = complete_with_retry(transport, requests[i], options.retry);
                 ++calls;
                 cache.insert({keys[i], model_name, raw, parse_label(raw), utc_timestamp()});
               });

  PredictionFile out;
  out.model_name = model_name;
  out.variant_name = options.variant_name;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto entry = cache.lookup(keys[i]);
    if (!entry) throw Error("cache lost entry for " + examples[i].id);
    out.records.push_back({examples[i].id, entry->parsed_label, entry->raw_response});
  }
  out.metadata["cache_hits"] = hits;
  out.metadata["network_requests"] = calls.load();
  out.metadata["invalid"] = out.invalid_count();
  return out;
}

}  // namespace nlirobust
