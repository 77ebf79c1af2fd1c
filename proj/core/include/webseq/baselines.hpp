// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "webseq/prediction.hpp"

namespace webseq {

using Context = std::vector<EventId>;

/// Maximum-likelihood N-gram counts.
///
/// `levels[k]` holds counts for contexts of length k (k = 0 is the unigram
/// table), for k = 0..order-1. predict() uses the longest seen suffix of the
/// query context and falls back to shorter ones without discounting.
class TransitionTable {
 public:
  struct Row {
    std::map<EventId, std::uint64_t> next;
    std::uint64_t total = 0;

    friend bool operator==(const Row&, const Row&) = default;
  };

  TransitionTable() = default;
  TransitionTable(std::size_t order, std::size_t vocab_size);

  std::size_t order() const noexcept { return order_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }

  /// Row for an exact context (length 0..order-1); nullptr when unseen.
  const Row* find(const Context& context) const;
  const std::map<Context, Row>& level(std::size_t context_length) const;

  void increment(const Context& context, EventId next);

  /// Text format: a "# order=N vocab=V" header, then
  /// `<context ids comma-joined>\t<event id>\t<count>` rows.
  void save(std::ostream& out) const;
  static TransitionTable load(std::istream& in);

  friend bool operator==(const TransitionTable&, const TransitionTable&) = default;

 private:
  std::size_t order_ = 0;
  std::size_t vocab_size_ = 0;
  std::vector<std::map<Context, Row>> levels_;
};

/// Counts every consecutive N-tuple (and all shorter suffix contexts used for
/// backoff). `vocab_size` of 0 means max id + 1. Throws FitError when the
/// stream is shorter than N or N is zero.
TransitionTable fit_ngram(std::span<const EventId> events, std::size_t order,
                          std::size_t vocab_size = 0);

/// Same as fit_ngram but over several independent streams (no n-gram crosses
/// a stream boundary).
TransitionTable fit_ngram(const std::vector<std::vector<EventId>>& streams, std::size_t order,
                          std::size_t vocab_size);

/// P(e | last order-1 ids of context), backing off to shorter contexts and
/// finally the unigram distribution.
PredictionDistribution predict(const TransitionTable& table, std::span<const EventId> context);

}  // namespace webseq
