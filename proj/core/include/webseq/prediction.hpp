// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "webseq/vocabulary.hpp"

namespace webseq {

/// Probability vector over the vocabulary for one target slot.
///
/// Ranking is total: events are ordered by descending probability, equal
/// probabilities by ascending id.
struct PredictionDistribution {
  std::vector<double> probs;
  std::string model_id;
  std::size_t target_index = 0;

  std::size_t size() const noexcept { return probs.size(); }

  /// Event ids in rank order.
  std::vector<EventId> ranking() const;

  /// First `n` entries of ranking().
  std::vector<EventId> top(std::size_t n) const;
};

}  // namespace webseq
