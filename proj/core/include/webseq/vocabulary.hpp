// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "webseq/extractor.hpp"

namespace webseq {

using EventId = std::uint32_t;

inline constexpr EventId kPadId = 0;
inline constexpr EventId kMaskId = 1;
inline constexpr EventId kRareId = 2;
inline constexpr EventId kFirstNormalId = 3;

inline constexpr std::string_view kPadToken = "PAD";
inline constexpr std::string_view kMaskToken = "MASK";
inline constexpr std::string_view kRareToken = "RARE";

/// Dense token <-> id map. Ids 0..2 are PAD, MASK and RARE; normal tokens
/// follow in descending training count, ties broken by token text.
class EventVocabulary {
 public:
  EventVocabulary();

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t rare_threshold() const noexcept { return rare_threshold_; }

  /// Total mapping: unknown or sub-threshold tokens resolve to RARE.
  EventId encode(std::string_view token) const;
  EventId encode(const Event& event) const { return encode(event.token); }

  const std::string& decode(EventId id) const;
  bool contains(std::string_view token) const;

  /// Training-split count of a token (0 when unseen). For retained tokens
  /// this is their own count; RARE aggregates every folded token.
  std::uint64_t train_count(EventId id) const;

  /// Every normal id, ascending.
  std::vector<EventId> normal_ids() const;

  /// `<id>\t<token>\t<train_count>` per line, ids ascending.
  void save(std::ostream& out) const;
  std::string serialize() const;
  static EventVocabulary load(std::istream& in, std::size_t rare_threshold = 0);

  /// FNV-1a of serialize(); stored in checkpoints to detect mismatches.
  std::uint64_t fingerprint() const;

  friend EventVocabulary build_vocabulary(const std::vector<Event>& train_events,
                                          std::size_t rare_threshold);

 private:
  void add(std::string token, std::uint64_t count);

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, EventId> index_;
  std::size_t rare_threshold_ = 1;
};

/// Keeps tokens seen at least `rare_threshold` times in the training events.
/// Throws FitError on an empty stream or a zero threshold.
EventVocabulary build_vocabulary(const std::vector<Event>& train_events,
                                 std::size_t rare_threshold);

}  // namespace webseq
