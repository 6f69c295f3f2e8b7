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

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "nlirobust/error.hpp"

namespace nlirobust {

using Sha256 = std::array<std::uint8_t, 32>;

// Incremental SHA-256 over OpenSSL's EVP interface.
class Sha256Hasher {
 public:
  Sha256Hasher() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialisation failed");
    }
  }

  Sha256Hasher& update(std::string_view bytes) {
    if (EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()) != 1) {
      throw Error("SHA-256 update failed");
    }
    return *this;
  }

  Sha256Hasher& update_byte(std::uint8_t b) {
    const char c = static_cast<char>(b);
    return update(std::string_view(&c, 1));
  }

  Sha256 finish() {
    Sha256 out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != 32) {
      throw Error("SHA-256 finalisation failed");
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

inline std::string sha256_hex(std::string_view bytes) {
  const Sha256 d = Sha256Hasher().update(bytes).finish();
  return to_hex(d);
}

// Digest over fields joined by the unit separator 0x1F. Truncated to
// `out_bytes` bytes before hex encoding.
inline std::string field_digest(std::span<const std::string_view> fields,
                                std::size_t out_bytes = 32) {
  Sha256Hasher h;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) h.update_byte(0x1F);
    h.update(fields[i]);
  }
  const Sha256 d = h.finish();
  return to_hex(std::span<const std::uint8_t>(d.data(), out_bytes));
}

}  // namespace nlirobust
