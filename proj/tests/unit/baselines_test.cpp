// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/baselines.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "webseq/errors.hpp"
#include "webseq/rng.hpp"

namespace webseq {
namespace {

constexpr EventId A = 3, B = 4, C = 5;

std::map<EventId, std::uint64_t> row(const TransitionTable& t, const Context& c) {
  const auto* r = t.find(c);
  return r ? r->next : std::map<EventId, std::uint64_t>{};
}

TEST(Fit, MarkovCounts) {
  const std::vector<EventId> seq = {A, B, A, B, A, C};
  const auto t = fit_ngram(seq, 2, 6);
  EXPECT_EQ(row(t, {A}), (std::map<EventId, std::uint64_t>{{B, 2}, {C, 1}}));
  EXPECT_EQ(row(t, {B}), (std::map<EventId, std::uint64_t>{{A, 2}}));
  EXPECT_EQ(t.find({C}), nullptr);
}

TEST(Fit, TrigramCounts) {
  const std::vector<EventId> seq = {A, B, A, B, A, C};
  const auto t = fit_ngram(seq, 3, 6);
  EXPECT_EQ(row(t, {A, B}), (std::map<EventId, std::uint64_t>{{A, 2}}));
  EXPECT_EQ(row(t, {B, A}), (std::map<EventId, std::uint64_t>{{B, 1}, {C, 1}}));
}

TEST(Fit, TooShortFails) {
  const std::vector<EventId> one = {A};
  EXPECT_THROW(fit_ngram(one, 2, 6), FitError);
}

TEST(Fit, RowTotalsMatchCounts) {
  Rng rng(3);
  std::vector<EventId> seq(500);
  for (auto& e : seq) e = static_cast<EventId>(rng.below(7));
  const auto t = fit_ngram(seq, 3, 7);
  for (std::size_t len = 0; len < 3; ++len) {
    for (const auto& [ctx, r] : t.level(len)) {
      std::uint64_t sum = 0;
      for (const auto& [e, n] : r.next) sum += n;
      EXPECT_EQ(sum, r.total);
    }
  }
}

TEST(Predict, RatiosAndBackoff) {
  const std::vector<EventId> seq = {A, B, A, B, A, C};
  const auto t = fit_ngram(seq, 2, 6);
  const std::vector<EventId> ctx = {B, A};
  const auto d = predict(t, ctx);
  EXPECT_DOUBLE_EQ(d.probs[B], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(d.probs[C], 1.0 / 3.0);
  EXPECT_EQ(d.model_id, "markov");
  // C never has a successor: fall back to the unigram over training events.
  const std::vector<EventId> unseen = {C};
  const auto u = predict(t, unseen);
  EXPECT_DOUBLE_EQ(u.probs[A], 3.0 / 6.0);
  EXPECT_DOUBLE_EQ(u.probs[B], 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(u.probs[C], 1.0 / 6.0);
}

TEST(Predict, DeterministicCorpus) {
  std::vector<EventId> seq;
  for (int i = 0; i < 50; ++i) seq.push_back(i % 2 ? B : A);
  const auto t = fit_ngram(seq, 2, 6);
  const std::vector<EventId> ctx = {A};
  EXPECT_EQ(predict(t, ctx).probs[B], 1.0);
}

TEST(Predict, MarkovUsesOnlyLastEvent) {
  Rng rng(4);
  std::vector<EventId> seq(400);
  for (auto& e : seq) e = static_cast<EventId>(rng.below(6));
  const auto t = fit_ngram(seq, 2, 6);
  for (int i = 0; i < 100; ++i) {
    std::vector<EventId> a(1 + rng.below(5)), b(1 + rng.below(5));
    for (auto& e : a) e = static_cast<EventId>(rng.below(6));
    for (auto& e : b) e = static_cast<EventId>(rng.below(6));
    b.back() = a.back();
    ASSERT_EQ(predict(t, a).probs, predict(t, b).probs);
  }
}

TEST(Predict, AlwaysNormalized) {
  Rng rng(5);
  for (int corpus = 0; corpus < 30; ++corpus) {
    const std::size_t v = 2 + rng.below(15);
    std::vector<EventId> seq(3 + rng.below(300));
    for (auto& e : seq) e = static_cast<EventId>(rng.below(v));
    for (std::size_t order : {1u, 2u, 3u, 4u}) {
      const auto t = fit_ngram(seq, order, v);
      for (int q = 0; q < 20; ++q) {
        std::vector<EventId> ctx(rng.below(5));
        for (auto& e : ctx) e = static_cast<EventId>(rng.below(v));
        double sum = 0.0;
        for (double p : predict(t, ctx).probs) {
          ASSERT_GE(p, 0.0);
          sum += p;
        }
        ASSERT_NEAR(sum, 1.0, 1e-12);
      }
    }
  }
}

TEST(Predict, MultiStreamFitDoesNotBridgeStreams) {
  const std::vector<std::vector<EventId>> streams = {{A, B}, {C, A}};
  const auto t = fit_ngram(streams, 2, 6);
  EXPECT_EQ(t.find({B}), nullptr);
  EXPECT_EQ(row(t, {A}), (std::map<EventId, std::uint64_t>{{B, 1}}));
}

TEST(TransitionTable, TextRoundTrip) {
  const std::vector<EventId> seq = {A, B, A, B, A, C, C, A};
  const auto t = fit_ngram(seq, 3, 6);
  std::stringstream buf;
  t.save(buf);
  EXPECT_EQ(buf.str().rfind("# order=3 vocab=6\n", 0), 0u);
  EXPECT_NE(buf.str().find("3,4\t3\t2\n"), std::string::npos);
  EXPECT_EQ(TransitionTable::load(buf), t);
}

}  // namespace
}  // namespace webseq
