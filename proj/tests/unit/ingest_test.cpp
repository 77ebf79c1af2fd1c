// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/ingest.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "webseq/errors.hpp"
#include "webseq/rng.hpp"

namespace webseq {
namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::milliseconds;

Timestamp day0() { return *parse_rfc3339("2020-01-06T00:00:00Z"); }

RawRequest at(Timestamp ts, std::string path = "/x") {
  RawRequest r;
  r.timestamp = ts;
  r.method = "GET";
  r.path = std::move(path);
  r.app_id = "app";
  return r;
}

TEST(ParseJsonl, MapsFieldsAndCountsPairs) {
  const auto r = parse_jsonl(R"({"ts":"2020-01-06T09:00:00Z","method":"get","uri":"/api/jobs?page=1&size=20"})");
  EXPECT_EQ(r.method, "GET");
  EXPECT_EQ(r.path, "/api/jobs");
  EXPECT_EQ(r.query_param_count, 2u);
  EXPECT_EQ(format_rfc3339(r.timestamp), "2020-01-06T09:00:00Z");
  EXPECT_EQ(r.app_id, "default");
  EXPECT_FALSE(r.actor_id);
}

TEST(ParseJsonl, EmptyQuery) {
  const auto r = parse_jsonl(R"({"ts":"2020-01-06T09:00:01Z","method":"POST","uri":"/login"})");
  EXPECT_EQ(r.method, "POST");
  EXPECT_EQ(r.path, "/login");
  EXPECT_EQ(r.query_param_count, 0u);
}

TEST(ParseJsonl, EmptyPathBecomesRoot) {
  const auto r = parse_jsonl(R"({"ts":"2020-01-06T09:00:01Z","method":"GET","uri":"?x=1"})");
  EXPECT_EQ(r.path, "/");
  EXPECT_EQ(r.query_param_count, 1u);
}

TEST(ParseJsonl, AppAndActor) {
  const auto r = parse_jsonl(R"({"ts":"2020-01-06T09:00:01+02:00","method":"GET","uri":"/","app":"wq","actor":"bob"})");
  EXPECT_EQ(r.app_id, "wq");
  EXPECT_EQ(r.actor_id, "bob");
  EXPECT_EQ(format_rfc3339(r.timestamp), "2020-01-06T07:00:01Z");
}

TEST(ParseJsonl, Errors) {
  try {
    parse_jsonl("{not json", 7);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
  try {
    parse_jsonl(R"({"ts":"2020-01-06T09:00:00Z","method":"GET"})", 3);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_jsonl(R"({"ts":"yesterday","method":"GET","uri":"/"})"), ParseError);
  EXPECT_THROW(parse_jsonl(R"({"ts":"2020-01-06T09:00:00Z","method":"G3T","uri":"/"})"), SchemaError);
  EXPECT_THROW(parse_jsonl(R"({"ts":"2020-01-06T09:00:00Z","method":1,"uri":"/"})"), SchemaError);
  EXPECT_THROW(parse_jsonl("[1,2]"), ParseError);
}

TEST(CountQueryParams, Segments) {
  EXPECT_EQ(count_query_params(""), 0u);
  EXPECT_EQ(count_query_params("a"), 1u);
  EXPECT_EQ(count_query_params("a=1&b"), 2u);
  EXPECT_EQ(count_query_params("a=1&&b=2&"), 2u);
}

TEST(SplitUri, Forms) {
  EXPECT_EQ(split_uri("/a/b?x=1?y"), std::make_pair(std::string("/a/b"), std::string("x=1?y")));
  EXPECT_EQ(split_uri("http://host:80/p?q").first, "/p");
  EXPECT_EQ(split_uri("rel/path").first, "/rel/path");
  EXPECT_EQ(split_uri("").first, "/");
}

TEST(ParseClf, CommonAndCombined) {
  const auto r = parse_clf(R"(1.2.3.4 - alice [06/Jan/2020:09:00:00 +0000] "GET /a/b?x=1 HTTP/1.1" 200 512)");
  EXPECT_EQ(r.method, "GET");
  EXPECT_EQ(r.path, "/a/b");
  EXPECT_EQ(r.query_param_count, 1u);
  EXPECT_EQ(r.actor_id, "alice");
  EXPECT_EQ(format_rfc3339(r.timestamp), "2020-01-06T09:00:00Z");

  const auto c = parse_clf(
      R"(5.6.7.8 - - [06/Jan/2020:10:00:00 +0100] "POST /login HTTP/1.1" 302 0 "-" "curl/7.0")");
  EXPECT_EQ(c.method, "POST");
  EXPECT_EQ(c.path, "/login");
  EXPECT_EQ(c.query_param_count, 0u);
  EXPECT_FALSE(c.actor_id);
  EXPECT_EQ(format_rfc3339(c.timestamp), "2020-01-06T09:00:00Z");
}

TEST(ParseClf, GarbageIsAParseError) {
  EXPECT_THROW(parse_clf("garbage line", 1), ParseError);
  EXPECT_THROW(parse_clf(R"(1.2.3.4 - - [bad time] "GET / HTTP/1.1" 200 1)"), ParseError);
}

TEST(Jsonl, RoundTripsRandomRequests) {
  Rng rng(1);
  const std::string chars = "abcXYZ019-_./%";
  for (int i = 0; i < 300; ++i) {
    RawRequest r;
    r.timestamp = day0() + milliseconds(static_cast<std::int64_t>(rng.below(1'000'000'000)));
    r.method = std::vector<std::string>{"GET", "POST", "DELETE", "PATCH"}[rng.below(4)];
    r.path = "/";
    for (std::size_t k = rng.below(20); k > 0; --k) r.path += chars[rng.below(chars.size())];
    for (std::size_t k = rng.below(4); k > 0; --k) {
      r.query += (r.query.empty() ? "" : "&") + std::string("k") + std::to_string(k) + "=v";
    }
    r.query_param_count = count_query_params(r.query);
    r.app_id = "app" + std::to_string(rng.below(3));
    if (rng.bernoulli(0.5)) r.actor_id = "user" + std::to_string(rng.below(9));
    ASSERT_EQ(parse_jsonl(to_jsonl(r)), r) << to_jsonl(r);
  }
}

TEST(ReadRequests, StrictAndLenient) {
  const std::string text =
      R"({"ts":"2020-01-06T09:00:00Z","method":"GET","uri":"/a"})"
      "\n\n"
      "broken\n"
      R"({"ts":"2020-01-06T09:00:01Z","method":"GET","uri":"/b"})"
      "\n";
  std::istringstream lenient(text);
  ReadStats stats;
  const auto out = read_requests(lenient, LogFormat::kJsonl, "x", false, &stats);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].path, "/a");
  EXPECT_EQ(out[1].path, "/b");
  EXPECT_EQ(stats.skipped, 1u);
  EXPECT_EQ(stats.blank, 1u);

  std::istringstream strict(text);
  try {
    read_requests(strict, LogFormat::kJsonl, "x", true);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(RequestFilter, DenyWins) {
  RequestFilter f;
  f.allow_actors = {"alice", "bot"};
  f.deny_actors = {"bot"};
  f.deny_path_prefixes = {"/health"};
  RawRequest r = at(day0());
  r.actor_id = "alice";
  EXPECT_TRUE(f.admits(r));
  r.path = "/healthz";
  EXPECT_FALSE(f.admits(r));
  r.path = "/x";
  r.actor_id = "bot";
  EXPECT_FALSE(f.admits(r));
  r.actor_id = "carol";
  EXPECT_FALSE(f.admits(r));
}

TEST(SplitByDay, PaperSizedSplit) {
  std::vector<RawRequest> log;
  for (int d = 0; d < 84; ++d) {
    for (int h = 0; h < 3; ++h) log.push_back(at(day0() + days(d) + hours(h * 5)));
  }
  const auto split = split_by_day(log, 64, 10, 10);
  EXPECT_EQ(split.train_days.size(), 64u);
  EXPECT_EQ(split.valid_days.size(), 10u);
  EXPECT_EQ(split.test_days.size(), 10u);
  EXPECT_TRUE(split.excluded_days.empty());
  EXPECT_EQ(*split.train_days.rbegin() + days(1), *split.valid_days.begin());
  EXPECT_EQ(*split.valid_days.rbegin() + days(1), *split.test_days.begin());
}

TEST(SplitByDay, SmallCases) {
  std::vector<RawRequest> three = {at(day0()), at(day0() + days(1)), at(day0() + days(2))};
  const auto s = split_by_day(three, 1, 1, 1);
  EXPECT_EQ(s.assign(three[0]), Split::kTrain);
  EXPECT_EQ(s.assign(three[1]), Split::kValid);
  EXPECT_EQ(s.assign(three[2]), Split::kTest);
  three.pop_back();
  EXPECT_THROW(split_by_day(three, 1, 1, 1), ConfigError);
}

TEST(SplitByDay, TotalAndDisjointWithGapDays) {
  Rng rng(4);
  std::vector<RawRequest> log;
  Timestamp t = day0();
  for (int i = 0; i < 2000; ++i) {
    t += milliseconds(static_cast<std::int64_t>(rng.below(3'600'000 * 3)));
    log.push_back(at(t, "/p" + std::to_string(i)));
  }
  const auto split = split_by_day(log, 5, 2, 3);
  const auto parts = partition(log, split);
  std::size_t excluded = 0;
  for (const auto& r : log) {
    const auto d = utc_date(r.timestamp);
    const int memberships = split.train_days.count(d) + split.valid_days.count(d) + split.test_days.count(d) +
                            split.excluded_days.count(d);
    ASSERT_EQ(memberships, 1);
    excluded += split.assign(r) == Split::kExcluded;
  }
  EXPECT_EQ(parts.train.size() + parts.valid.size() + parts.test.size() + excluded, log.size());
  // Input order survives inside a split.
  for (std::size_t i = 1; i < parts.train.size(); ++i) {
    EXPECT_LE(parts.train[i - 1].timestamp, parts.train[i].timestamp);
  }
  // The test block is the most recent days.
  EXPECT_EQ(*split.test_days.rbegin(), utc_date(log.back().timestamp));
}

}  // namespace
}  // namespace webseq
