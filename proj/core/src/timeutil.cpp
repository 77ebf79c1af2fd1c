// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/timeutil.hpp"

#include <array>
#include <cstdio>

namespace webseq {
namespace {

using namespace std::chrono;

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = text[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

std::optional<Timestamp> make_time(int y, int mo, int d, int h, int mi, int s, int ms,
                                   int offset_minutes) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  Timestamp ts = time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} +
                 seconds{s} + milliseconds{ms};
  return ts - minutes{offset_minutes};
}

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr",
                                                      "May", "Jun", "Jul", "Aug",
                                                      "Sep", "Oct", "Nov", "Dec"};

}  // namespace

std::optional<Timestamp> parse_rfc3339(std::string_view t) {
  int y, mo, d, h, mi, s;
  if (!read_digits(t, 0, 4, y) || t.size() < 19 || t[4] != '-' || !read_digits(t, 5, 2, mo) ||
      t[7] != '-' || !read_digits(t, 8, 2, d) || (t[10] != 'T' && t[10] != 't' && t[10] != ' ') ||
      !read_digits(t, 11, 2, h) || t[13] != ':' || !read_digits(t, 14, 2, mi) || t[16] != ':' ||
      !read_digits(t, 17, 2, s)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  int ms = 0;
  if (pos < t.size() && t[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < t.size() && t[pos] >= '0' && t[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (t[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (int i = digits; i < 3; ++i) ms *= 10;
  }
  if (pos >= t.size()) return std::nullopt;
  int offset = 0;
  if (t[pos] == 'Z' || t[pos] == 'z') {
    ++pos;
  } else if (t[pos] == '+' || t[pos] == '-') {
    const int sign = t[pos] == '-' ? -1 : 1;
    int oh, om;
    if (!read_digits(t, pos + 1, 2, oh) || pos + 3 >= t.size() || t[pos + 3] != ':' ||
        !read_digits(t, pos + 4, 2, om)) {
      return std::nullopt;
    }
    offset = sign * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != t.size()) return std::nullopt;
  return make_time(y, mo, d, h, mi, s, ms, offset);
}

std::string format_rfc3339(Timestamp ts) {
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{ts - day_point};
  char buf[40];
  const auto ms = tod.subseconds().count();
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lld.%03lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()), static_cast<long long>(ms));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
  }
  return buf;
}

std::optional<Timestamp> parse_clf_time(std::string_view t) {
  // dd/Mon/yyyy:HH:MM:SS +zzzz
  int d, y, h, mi, s, oh, om;
  if (t.size() != 26 || !read_digits(t, 0, 2, d) || t[2] != '/' || t[6] != '/' ||
      !read_digits(t, 7, 4, y) || t[11] != ':' || !read_digits(t, 12, 2, h) || t[14] != ':' ||
      !read_digits(t, 15, 2, mi) || t[17] != ':' || !read_digits(t, 18, 2, s) || t[20] != ' ' ||
      (t[21] != '+' && t[21] != '-') || !read_digits(t, 22, 2, oh) ||
      !read_digits(t, 24, 2, om)) {
    return std::nullopt;
  }
  const std::string_view mon = t.substr(3, 3);
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (kMonths[i] == mon) mo = static_cast<int>(i) + 1;
  }
  if (mo == 0) return std::nullopt;
  const int offset = (t[21] == '-' ? -1 : 1) * (oh * 60 + om);
  return make_time(y, mo, d, h, mi, s, 0, offset);
}

std::string format_clf_time(Timestamp ts) {
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{ts - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02ld:%02ld:%02lld +0000",
                static_cast<unsigned>(ymd.day()),
                std::string(kMonths[static_cast<unsigned>(ymd.month()) - 1]).c_str(),
                static_cast<int>(ymd.year()), static_cast<long>(tod.hours().count()),
                static_cast<long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()));
  return buf;
}

CalendarDate utc_date(Timestamp ts) { return floor<days>(ts); }

std::string format_date(CalendarDate date) {
  const year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace webseq
