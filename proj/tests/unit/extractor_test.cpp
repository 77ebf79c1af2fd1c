// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/extractor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "webseq/char_markov.hpp"
#include "webseq/errors.hpp"
#include "webseq/ingest.hpp"
#include "webseq/rng.hpp"
#include "webseq/vocabulary.hpp"

namespace webseq {
namespace {

std::vector<std::string> texts(const std::vector<PathElement>& elements) {
  std::vector<std::string> out;
  for (const auto& e : elements) out.push_back(e.text);
  return out;
}

const CharMarkovModel& word_model() {
  static const CharMarkovModel model = [] {
    CharMarkovFitOptions options;
    options.good_sample = bundled_words();
    return fit_char_markov(bundled_words(), options);
  }();
  return model;
}

RawRequest request(std::string method, std::string uri) {
  RawRequest r;
  r.method = std::move(method);
  std::tie(r.path, r.query) = split_uri(uri);
  r.query_param_count = count_query_params(r.query);
  return r;
}

TEST(SegmentPath, Delimiters) {
  EXPECT_EQ(texts(segment_path("/api/user-profile/list")),
            (std::vector<std::string>{"api", "user", "profile", "list"}));
  EXPECT_TRUE(segment_path("/").empty());
  EXPECT_TRUE(segment_path("").empty());
  EXPECT_EQ(texts(segment_path("/a_b.c")), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(texts(segment_path("//a--b/")), (std::vector<std::string>{"a", "b"}));
}

TEST(SegmentPath, ElementsNeverContainDelimiters) {
  Rng rng(3);
  const std::string alphabet = "ab/-_.x";
  for (int i = 0; i < 500; ++i) {
    std::string path;
    for (std::size_t k = rng.below(30); k > 0; --k) path += alphabet[rng.below(alphabet.size())];
    for (const auto& e : segment_path(path)) {
      ASSERT_FALSE(e.text.empty());
      ASSERT_EQ(e.text.find_first_of(kPathDelimiters), std::string::npos);
    }
  }
}

TEST(CharMarkov, ObservedTransitionIsModal) {
  const auto model = fit_char_markov({"aaaa"});
  const double paa = model.prob('a', 'a', 'a');
  for (char c = 'b'; c <= 'z'; ++c) EXPECT_GT(paa, model.prob('a', 'a', c));
}

TEST(CharMarkov, ContextsAreNormalized) {
  const auto& model = word_model();
  for (std::size_t a = 0; a < CharMarkovModel::kAlphabet; ++a) {
    for (std::size_t b = 0; b < CharMarkovModel::kAlphabet; ++b) {
      double sum = 0.0;
      for (std::size_t c = 0; c < CharMarkovModel::kAlphabet; ++c) sum += std::exp(model.log_prob(a, b, c));
      ASSERT_NEAR(sum, 1.0, 1e-9);
    }
  }
  EXPECT_TRUE(std::isfinite(model.threshold()));
}

TEST(CharMarkov, EmptyCorpusFails) { EXPECT_THROW(fit_char_markov({}), FitError); }

// Scores frozen by the independent counting script in tests/oracles.
TEST(CharMarkov, MatchesIndependentCounts) {
  std::ifstream in(std::string(WEBSEQ_ORACLE_DIR) + "/char_markov_expected.tsv");
  ASSERT_TRUE(in) << "missing oracle table";
  std::map<std::string, double> expected;
  std::string probe, value;
  while (std::getline(in, probe, '\t') && std::getline(in, value)) expected[probe] = std::stod(value);
  ASSERT_GE(expected.size(), 10u);
  for (const auto& [p, want] : expected) EXPECT_NEAR(word_model().score(p), want, 1e-12) << p;
  EXPECT_GT(expected.at("status"), expected.at("q9z3k1x7"));
}

TEST(CharMarkov, Classification) {
  const auto& m = word_model();
  EXPECT_FALSE(is_random_element(m, "status"));
  EXPECT_TRUE(is_random_element(m, "a8f3k2x9q1"));
  EXPECT_TRUE(is_random_element(m, "42"));
  EXPECT_TRUE(is_random_element(m, "ab"));
  EXPECT_TRUE(is_random_element(m, "1234567"));
}

TEST(CharMarkov, SaveLoadRoundTrip) {
  std::stringstream buf;
  word_model().save(buf);
  EXPECT_EQ(CharMarkovModel::load(buf), word_model());
  std::istringstream bad("something else\n");
  EXPECT_THROW(CharMarkovModel::load(bad), ParseError);
}

TEST(CharMarkov, ThresholdOverride) {
  CharMarkovFitOptions options;
  options.threshold_override = -1.0;
  const auto m = fit_char_markov({"status"}, options);
  EXPECT_EQ(m.threshold(), -1.0);
  EXPECT_TRUE(is_random_element(m, "status"));
}

TEST(Canonicalize, Examples) {
  const auto& m = word_model();
  EXPECT_EQ(canonicalize(request("GET", "/api/users?page=1&size=20"), m).token, "GET /api/users 2");
  EXPECT_EQ(canonicalize(request("GET", "/jobs/a8f3k2x9q1/log"), m).token, "GET /jobs/RANDOM/log 0");
  EXPECT_EQ(canonicalize(request("POST", "/"), m).token, "POST / 0");
  EXPECT_EQ(canonicalize(request("GET", "/item/123456/view.summary"), m).token, "GET /item/RANDOM/view/summary 0");
}

TEST(Canonicalize, DeterministicAndCollisionFree) {
  Rng rng(8);
  const std::string alphabet = "abcdefgh0123/-";
  for (int i = 0; i < 300; ++i) {
    std::string uri = "/";
    for (std::size_t k = rng.below(25); k > 0; --k) uri += alphabet[rng.below(alphabet.size())];
    const auto r = request("GET", uri);
    const auto e = canonicalize(r, word_model());
    ASSERT_EQ(e, canonicalize(r, word_model()));
    ASSERT_EQ(std::count(e.token.begin(), e.token.end(), ' '), 2);
    ASSERT_NE(e.token, kPadToken);
    ASSERT_NE(e.token, kMaskToken);
    ASSERT_NE(e.token, kRareToken);
  }
}

TEST(TrainingElements, SkipsNumericAndLowercases) {
  const auto out = training_elements({request("GET", "/API/v2/123/Users")});
  EXPECT_EQ(out, (std::vector<std::string>{"api", "v2", "users"}));
}

std::vector<Event> events(const std::map<std::string, int>& counts) {
  std::vector<Event> out;
  for (const auto& [token, n] : counts) {
    for (int i = 0; i < n; ++i) out.push_back(Event::normal(token));
  }
  return out;
}

TEST(Vocabulary, ThresholdFoldsToRare) {
  const auto v = build_vocabulary(events({{"A x 0", 5}, {"B x 0", 1}}), 2);
  EXPECT_TRUE(v.contains("A x 0"));
  EXPECT_FALSE(v.contains("B x 0"));
  EXPECT_EQ(v.encode("B x 0"), kRareId);
  EXPECT_EQ(v.encode("never seen 0"), kRareId);
  EXPECT_EQ(v.encode(kMaskToken), kMaskId);
  EXPECT_EQ(v.encode(kPadToken), kPadId);
  EXPECT_EQ(v.train_count(kRareId), 1u);
  const auto all = build_vocabulary(events({{"A x 0", 5}, {"B x 0", 1}}), 1);
  EXPECT_TRUE(all.contains("B x 0"));
  EXPECT_THROW(build_vocabulary({}, 2), FitError);
}

TEST(Vocabulary, GoldenFile) {
  const auto v = build_vocabulary(
      events({{"GET /a 0", 5}, {"POST /c 0", 3}, {"GET /b 1", 3}, {"GET /d 0", 1}}), 2);
  std::ifstream in(std::string(WEBSEQ_GOLDEN_DIR) + "/vocab_small.tsv");
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(v.serialize(), golden.str());
  std::istringstream back(v.serialize());
  const auto loaded = EventVocabulary::load(back, 2);
  EXPECT_EQ(loaded.serialize(), v.serialize());
  EXPECT_EQ(loaded.fingerprint(), v.fingerprint());
}

TEST(Vocabulary, ClosureAndMonotoneThreshold) {
  Rng rng(11);
  std::vector<Event> train;
  for (int i = 0; i < 3000; ++i) {
    // Zipf-ish: low ids far more common.
    const auto id = rng.below(1 + rng.below(200));
    train.push_back(Event::normal("GET /e" + std::to_string(id) + " 0"));
  }
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = 1; t <= 12; ++t) {
    const auto v = build_vocabulary(train, t);
    EXPECT_LE(v.size(), prev);
    prev = v.size();
    for (EventId id = kFirstNormalId; id < v.size(); ++id) {
      ASSERT_GE(v.train_count(id), t);
      ASSERT_EQ(v.encode(v.decode(id)), id);
    }
    for (const auto& e : train) ASSERT_LT(v.encode(e), v.size());
  }
}

TEST(Vocabulary, LoadRejectsMalformed) {
  std::istringstream gap("0\tPAD\t0\n1\tMASK\t0\n2\tRARE\t0\n5\tGET / 0\t2\n");
  EXPECT_THROW(EventVocabulary::load(gap), ParseError);
  std::istringstream no_reserved("0\tGET / 0\t2\n");
  EXPECT_THROW(EventVocabulary::load(no_reserved), ParseError);
}

}  // namespace
}  // namespace webseq
