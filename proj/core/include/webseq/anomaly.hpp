// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "webseq/prediction.hpp"

namespace webseq {

/// Outcome of scoring one observed event against a prediction.
struct AnomalyVerdict {
  EventId observed = 0;
  std::size_t rank = 0;  ///< tau: events ranked above the observed one (0 = argmax)
  double score = 0.0;    ///< 1 - 1/(tau + 1), in [0, 1)
  bool alarmed = false;  ///< observed event not among the top K
  std::size_t top_k = 1;

  friend bool operator==(const AnomalyVerdict&, const AnomalyVerdict&) = default;
};

/// Events strictly more probable than `observed`, plus equally probable events
/// with a smaller id. Throws ContractError when `observed` is out of range.
std::size_t rank_of(const PredictionDistribution& dist, EventId observed);

/// 1 - 1/(tau + 1).
double anomaly_score(std::size_t rank) noexcept;

/// Alarm when rank >= k. Throws ContractError for k == 0.
AnomalyVerdict judge(const PredictionDistribution& dist, EventId observed, std::size_t k);

}  // namespace webseq
