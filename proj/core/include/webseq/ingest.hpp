// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "webseq/timeutil.hpp"

namespace webseq {

/// One parsed HTTP request. Only the method, the URI path and the number of
/// query parameters feed event extraction; the raw query string is kept so a
/// request survives a write/read cycle unchanged.
struct RawRequest {
  Timestamp timestamp{};
  std::string method;  ///< uppercase, [A-Z]+
  std::string path;    ///< starts with '/'
  std::string query;   ///< text after the first '?', may be empty
  std::size_t query_param_count = 0;
  std::string app_id;
  std::optional<std::string> actor_id;

  friend bool operator==(const RawRequest&, const RawRequest&) = default;
};

enum class LogFormat { kJsonl, kClf };

LogFormat parse_log_format(std::string_view name);

/// Splits a request target into (path, query) at the first '?', normalizing the
/// path: absolute-form targets lose their scheme and authority, an empty path
/// becomes "/", and a relative path gains a leading '/'.
std::pair<std::string, std::string> split_uri(std::string_view uri);

/// Number of '&'-separated key[=value] pairs; empty segments are not pairs.
std::size_t count_query_params(std::string_view query);

/// Parses one canonical record: a JSON object with `ts` (RFC 3339), `method`,
/// `uri` and optional `app` / `actor`. `default_app` fills a missing `app`.
///
/// Throws ParseError for malformed JSON or an unreadable timestamp and
/// SchemaError for a missing or mistyped field.
RawRequest parse_jsonl(std::string_view line, std::size_t line_no = 0,
                       std::string_view default_app = "default");

/// Parses a Common or Combined Log Format line. The authenticated user
/// becomes the actor when it is not "-".
RawRequest parse_clf(std::string_view line, std::size_t line_no = 0,
                     std::string_view app = "default");

/// Inverse of parse_jsonl: one JSON object, no trailing newline.
std::string to_jsonl(const RawRequest& request);

struct ReadStats {
  std::size_t lines = 0;
  std::size_t parsed = 0;
  std::size_t skipped = 0;  ///< unparseable lines skipped in lenient mode
  std::size_t blank = 0;
};

/// Reads a whole stream in input order. Strict mode rethrows the first parse
/// failure; lenient mode counts and skips it.
std::vector<RawRequest> read_requests(std::istream& in, LogFormat format,
                                      std::string_view default_app, bool strict,
                                      ReadStats* stats = nullptr);

/// Allow/deny lists for excluding machine-generated traffic. Empty allow lists
/// admit everything; deny lists win over allow lists. Path entries match by prefix.
struct RequestFilter {
  std::vector<std::string> allow_actors;
  std::vector<std::string> deny_actors;
  std::vector<std::string> deny_path_prefixes;

  bool admits(const RawRequest& request) const;
};

enum class Split { kTrain, kValid, kTest, kExcluded };

std::string_view split_name(Split split);

/// Calendar-day partition. Days between the validation block and the most
/// recent `test` days (present only when the log covers more days than
/// requested) are excluded rather than silently assigned.
struct DatasetSplit {
  std::set<CalendarDate> train_days;
  std::set<CalendarDate> valid_days;
  std::set<CalendarDate> test_days;
  std::set<CalendarDate> excluded_days;

  Split assign(const RawRequest& request) const;
};

/// Earliest `train_n` dates to train, the next `valid_n` to validation and the
/// last `test_n` to test. Throws ConfigError when the log has too few distinct dates.
DatasetSplit split_by_day(const std::vector<RawRequest>& requests, std::size_t train_n,
                          std::size_t valid_n, std::size_t test_n);

struct SplitRequests {
  std::vector<RawRequest> train;
  std::vector<RawRequest> valid;
  std::vector<RawRequest> test;
};

/// Applies a DatasetSplit, preserving input order inside each split.
SplitRequests partition(const std::vector<RawRequest>& requests, const DatasetSplit& split);

}  // namespace webseq
