// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/anomaly.hpp"

#include <algorithm>
#include <numeric>

#include "webseq/errors.hpp"

namespace webseq {

std::vector<EventId> PredictionDistribution::ranking() const {
  std::vector<EventId> order(probs.size());
  std::iota(order.begin(), order.end(), EventId{0});
  std::stable_sort(order.begin(), order.end(),
                   [this](EventId a, EventId b) { return probs[a] > probs[b]; });
  return order;
}

std::vector<EventId> PredictionDistribution::top(std::size_t n) const {
  auto order = ranking();
  if (order.size() > n) order.resize(n);
  return order;
}

std::size_t rank_of(const PredictionDistribution& dist, EventId observed) {
  if (observed >= dist.probs.size()) {
    throw ContractError("observed id " + std::to_string(observed) +
                        " outside distribution of size " + std::to_string(dist.probs.size()));
  }
  const double p = dist.probs[observed];
  std::size_t rank = 0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] > p || (dist.probs[i] == p && i < observed)) ++rank;
  }
  return rank;
}

double anomaly_score(std::size_t rank) noexcept {
  return 1.0 - 1.0 / (static_cast<double>(rank) + 1.0);
}

AnomalyVerdict judge(const PredictionDistribution& dist, EventId observed, std::size_t k) {
  if (k == 0) throw ContractError("alarm threshold K must be positive");
  AnomalyVerdict v;
  v.observed = observed;
  v.rank = rank_of(dist, observed);
  v.score = anomaly_score(v.rank);
  v.top_k = k;
  v.alarmed = v.rank >= k;
  return v;
}

}  // namespace webseq
