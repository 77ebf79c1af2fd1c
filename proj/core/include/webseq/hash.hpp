// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace webseq {

/// 64-bit FNV-1a. Stable across platforms and runs; used for vocabulary and
/// config fingerprints, never for security.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Lowercase 16-digit hex rendering of a 64-bit hash.
std::string hex64(std::uint64_t value);

}  // namespace webseq
