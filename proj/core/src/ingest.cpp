// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/ingest.hpp"

#include <algorithm>
#include <istream>

#include "json.hpp"
#include "webseq/errors.hpp"

namespace webseq {
namespace {

using json = nlohmann::json;

std::string normalize_method(std::string_view method, std::size_t line_no) {
  std::string out;
  out.reserve(method.size());
  for (char c : method) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    if (c < 'A' || c > 'Z') {
      throw SchemaError("method must be alphabetic, got \"" + std::string(method) + "\"", line_no);
    }
    out.push_back(c);
  }
  if (out.empty()) throw SchemaError("empty method", line_no);
  return out;
}

const std::string& require_string(const json& obj, const char* key, std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field \"") + key + "\"", line_no);
  if (!it->is_string()) throw SchemaError(std::string("field \"") + key + "\" must be a string", line_no);
  return it->get_ref<const std::string&>();
}

RawRequest build(Timestamp ts, std::string_view method, std::string_view uri, std::string app,
                 std::optional<std::string> actor, std::size_t line_no) {
  RawRequest r;
  r.timestamp = ts;
  r.method = normalize_method(method, line_no);
  auto [path, query] = split_uri(uri);
  r.path = std::move(path);
  r.query = std::move(query);
  r.query_param_count = count_query_params(r.query);
  r.app_id = std::move(app);
  r.actor_id = std::move(actor);
  return r;
}

// Splits off the next space-delimited field.
std::string_view next_field(std::string_view& rest) {
  const auto start = rest.find_first_not_of(' ');
  if (start == std::string_view::npos) {
    rest = {};
    return {};
  }
  rest.remove_prefix(start);
  const auto end = rest.find(' ');
  std::string_view field = rest.substr(0, end);
  rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
  return field;
}

}  // namespace

LogFormat parse_log_format(std::string_view name) {
  if (name == "jsonl") return LogFormat::kJsonl;
  if (name == "clf" || name == "combined") return LogFormat::kClf;
  throw ConfigError("unknown log format \"" + std::string(name) + "\" (expected jsonl or clf)");
}

std::pair<std::string, std::string> split_uri(std::string_view uri) {
  std::string_view path = uri;
  std::string_view query;
  if (const auto q = uri.find('?'); q != std::string_view::npos) {
    path = uri.substr(0, q);
    query = uri.substr(q + 1);
  }
  if (const auto fragment = query.find('#'); fragment != std::string_view::npos) {
    query = query.substr(0, fragment);
  }
  if (const auto fragment = path.find('#'); fragment != std::string_view::npos) {
    path = path.substr(0, fragment);
  }
  // absolute-form: scheme://authority/path
  if (const auto scheme = path.find("://"); scheme != std::string_view::npos &&
                                            path.find('/') > scheme) {
    const auto slash = path.find('/', scheme + 3);
    path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash);
  }
  std::string normalized;
  if (path.empty() || path.front() != '/') normalized.push_back('/');
  normalized.append(path);
  return {normalized, std::string(query)};
}

std::size_t count_query_params(std::string_view query) {
  std::size_t count = 0;
  while (!query.empty()) {
    const auto amp = query.find('&');
    const std::string_view pair = query.substr(0, amp);
    if (!pair.empty()) ++count;
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return count;
}

RawRequest parse_jsonl(std::string_view line, std::size_t line_no, std::string_view default_app) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), line_no);
  }
  if (!obj.is_object()) throw ParseError("record is not a JSON object", line_no);

  const std::string& ts_text = require_string(obj, "ts", line_no);
  const auto ts = parse_rfc3339(ts_text);
  if (!ts) throw ParseError("unreadable timestamp \"" + ts_text + "\"", line_no);
  const std::string& method = require_string(obj, "method", line_no);
  const std::string& uri = require_string(obj, "uri", line_no);

  std::string app(default_app);
  if (const auto it = obj.find("app"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("field \"app\" must be a string", line_no);
    app = it->get<std::string>();
  }
  std::optional<std::string> actor;
  if (const auto it = obj.find("actor"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("field \"actor\" must be a string", line_no);
    actor = it->get<std::string>();
  }
  return build(*ts, method, uri, std::move(app), std::move(actor), line_no);
}

RawRequest parse_clf(std::string_view line, std::size_t line_no, std::string_view app) {
  // host ident authuser [date] "request" status bytes ["referer" "agent"]
  std::string_view rest = line;
  const std::string_view host = next_field(rest);
  const std::string_view ident = next_field(rest);
  const std::string_view user = next_field(rest);
  if (host.empty() || ident.empty() || user.empty()) {
    throw ParseError("not a common log format line", line_no);
  }
  const auto open = rest.find('[');
  const auto close = rest.find(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      rest.substr(0, open).find_first_not_of(' ') != std::string_view::npos) {
    throw ParseError("missing bracketed timestamp", line_no);
  }
  const auto ts = parse_clf_time(rest.substr(open + 1, close - open - 1));
  if (!ts) throw ParseError("unreadable access-log timestamp", line_no);
  rest.remove_prefix(close + 1);

  const auto q1 = rest.find('"');
  const auto q2 = q1 == std::string_view::npos ? q1 : rest.find('"', q1 + 1);
  if (q1 == std::string_view::npos || q2 == std::string_view::npos) {
    throw ParseError("missing quoted request line", line_no);
  }
  std::string_view request = rest.substr(q1 + 1, q2 - q1 - 1);
  std::string_view after = rest.substr(q2 + 1);
  const std::string_view status = next_field(after);
  if (status.size() != 3 || !std::all_of(status.begin(), status.end(),
                                         [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError("missing status code", line_no);
  }

  const std::string_view method = next_field(request);
  const std::string_view target = next_field(request);
  if (method.empty() || target.empty()) throw ParseError("malformed request line", line_no);
  std::optional<std::string> actor;
  if (user != "-") actor = std::string(user);
  try {
    return build(*ts, method, target, std::string(app), std::move(actor), line_no);
  } catch (const SchemaError& e) {
    throw ParseError(e.what());
  }
}

std::string to_jsonl(const RawRequest& request) {
  // Field order is fixed so that output files are byte-stable.
  std::string uri = request.path;
  if (!request.query.empty()) uri += "?" + request.query;
  std::string out = "{\"ts\":" + json(format_rfc3339(request.timestamp)).dump() +
                    ",\"method\":" + json(request.method).dump() + ",\"uri\":" + json(uri).dump() +
                    ",\"app\":" + json(request.app_id).dump();
  if (request.actor_id) out += ",\"actor\":" + json(*request.actor_id).dump();
  out += "}";
  return out;
}

std::vector<RawRequest> read_requests(std::istream& in, LogFormat format,
                                      std::string_view default_app, bool strict,
                                      ReadStats* stats) {
  std::vector<RawRequest> out;
  ReadStats local;
  std::string line;
  while (std::getline(in, line)) {
    ++local.lines;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      ++local.blank;
      continue;
    }
    try {
      out.push_back(format == LogFormat::kJsonl ? parse_jsonl(line, local.lines, default_app)
                                                : parse_clf(line, local.lines, default_app));
      ++local.parsed;
    } catch (const Error&) {
      if (strict) throw;
      ++local.skipped;
    }
  }
  if (stats) *stats = local;
  return out;
}

bool RequestFilter::admits(const RawRequest& request) const {
  const std::string actor = request.actor_id.value_or("");
  if (std::find(deny_actors.begin(), deny_actors.end(), actor) != deny_actors.end()) return false;
  for (const auto& prefix : deny_path_prefixes) {
    if (request.path.starts_with(prefix)) return false;
  }
  if (!allow_actors.empty() &&
      std::find(allow_actors.begin(), allow_actors.end(), actor) == allow_actors.end()) {
    return false;
  }
  return true;
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
    case Split::kExcluded: return "excluded";
  }
  return "excluded";
}

Split DatasetSplit::assign(const RawRequest& request) const {
  const CalendarDate date = utc_date(request.timestamp);
  if (train_days.contains(date)) return Split::kTrain;
  if (valid_days.contains(date)) return Split::kValid;
  if (test_days.contains(date)) return Split::kTest;
  return Split::kExcluded;
}

DatasetSplit split_by_day(const std::vector<RawRequest>& requests, std::size_t train_n,
                          std::size_t valid_n, std::size_t test_n) {
  std::set<CalendarDate> dates;
  for (const auto& r : requests) dates.insert(utc_date(r.timestamp));
  const std::size_t needed = train_n + valid_n + test_n;
  if (dates.size() < needed) {
    throw ConfigError("log covers " + std::to_string(dates.size()) + " distinct days but the split needs " +
                      std::to_string(needed));
  }
  DatasetSplit split;
  std::size_t i = 0;
  const std::size_t test_start = dates.size() - test_n;
  for (const CalendarDate d : dates) {
    if (i < train_n) {
      split.train_days.insert(d);
    } else if (i < train_n + valid_n) {
      split.valid_days.insert(d);
    } else if (i >= test_start) {
      split.test_days.insert(d);
    } else {
      split.excluded_days.insert(d);
    }
    ++i;
  }
  return split;
}

SplitRequests partition(const std::vector<RawRequest>& requests, const DatasetSplit& split) {
  SplitRequests out;
  for (const auto& r : requests) {
    switch (split.assign(r)) {
      case Split::kTrain: out.train.push_back(r); break;
      case Split::kValid: out.valid.push_back(r); break;
      case Split::kTest: out.test.push_back(r); break;
      case Split::kExcluded: break;
    }
  }
  return out;
}

}  // namespace webseq
