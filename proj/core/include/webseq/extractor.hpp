// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "webseq/char_markov.hpp"
#include "webseq/ingest.hpp"

namespace webseq {

inline constexpr std::string_view kRandomPlaceholder = "RANDOM";
inline constexpr std::string_view kPathDelimiters = "/-_.";

struct PathElement {
  std::string text;
  bool flagged_random = false;

  friend bool operator==(const PathElement&, const PathElement&) = default;
};

enum class EventKind { kNormal, kRare, kMask, kPad };

/// Canonical event. Normal tokens read "<METHOD> <derandomized path> <params>";
/// the reserved tokens PAD, MASK and RARE contain no space and so can never
/// collide with a normal token.
struct Event {
  std::string token;
  EventKind kind = EventKind::kNormal;

  static Event normal(std::string token) { return {std::move(token), EventKind::kNormal}; }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Splits a path on '/', '-', '_' and '.', dropping empty pieces.
/// Elements come back unflagged.
std::vector<PathElement> segment_path(std::string_view path);

/// Path with every random-looking element replaced by RANDOM, rejoined with '/'.
std::string derandomize_path(std::string_view path, const CharMarkovModel& model);

/// Builds the event token for a request.
Event canonicalize(const RawRequest& request, const CharMarkovModel& model);

/// Path elements usable as char-model training text: everything that is not
/// purely numeric, lowercased.
std::vector<std::string> training_elements(const std::vector<RawRequest>& requests);

}  // namespace webseq
