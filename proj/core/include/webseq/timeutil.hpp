// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace webseq {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using CalendarDate = std::chrono::sys_days;

/// Parses an RFC 3339 date-time ("2020-01-06T09:00:00Z", optional fractional
/// seconds, "Z" or "+hh:mm" offset) and normalizes to UTC.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ", adding ".mmm" only when milliseconds are non-zero.
std::string format_rfc3339(Timestamp ts);

/// Parses the bracketed access-log form "06/Jan/2020:09:00:00 +0000" (without brackets).
std::optional<Timestamp> parse_clf_time(std::string_view text);

/// Formats as access-log time in UTC ("06/Jan/2020:09:00:00 +0000").
std::string format_clf_time(Timestamp ts);

/// UTC calendar date of a timestamp.
CalendarDate utc_date(Timestamp ts);

/// "YYYY-MM-DD".
std::string format_date(CalendarDate date);

}  // namespace webseq
