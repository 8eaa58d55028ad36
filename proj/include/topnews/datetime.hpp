#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace topnews {

using timestamp = std::chrono::sys_seconds;
using date = std::chrono::sys_days;

namespace datetime_detail {

inline bool parse_uint(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline std::optional<timestamp> make(int y, int mo, int d, int h, int mi, int s) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

struct civil {
  int year, month, day, hour, minute, second;
  unsigned weekday;
};

inline civil split(timestamp t) {
  using namespace std::chrono;
  const auto d = floor<days>(t);
  const year_month_day ymd{d};
  const hh_mm_ss hms{t - d};
  return {int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day())),
          int(hms.hours().count()), int(hms.minutes().count()), int(hms.seconds().count()),
          weekday{d}.c_encoding()};
}

inline constexpr std::array<std::string_view, 12> month_names{
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
inline constexpr std::array<std::string_view, 7> weekday_names{
    "Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

}  // namespace datetime_detail

/// "YYYYMMDDhhmmss", the timestamp form used in archive replay paths.
inline std::optional<timestamp> parse_timestamp14(std::string_view s) {
  using datetime_detail::parse_uint;
  if (s.size() != 14) return std::nullopt;
  int y, mo, d, h, mi, sec;
  if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(4, 2), mo) ||
      !parse_uint(s.substr(6, 2), d) || !parse_uint(s.substr(8, 2), h) ||
      !parse_uint(s.substr(10, 2), mi) || !parse_uint(s.substr(12, 2), sec))
    return std::nullopt;
  return datetime_detail::make(y, mo, d, h, mi, sec);
}

inline std::string format_timestamp14(timestamp t) {
  const auto c = datetime_detail::split(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d%02d%02d%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

/// RFC 1123 date as used by the Memento "datetime" link parameter,
/// e.g. "Tue, 01 Nov 2016 01:00:00 GMT".
inline std::optional<timestamp> parse_http_date(std::string_view s) {
  using datetime_detail::parse_uint;
  if (s.size() != 29 || s[3] != ',' || s[4] != ' ' || s[7] != ' ' || s[11] != ' ' ||
      s[16] != ' ' || s[19] != ':' || s[22] != ':' || s.substr(25) != " GMT")
    return std::nullopt;
  int mo = 0;
  for (std::size_t i = 0; i < datetime_detail::month_names.size(); ++i)
    if (s.substr(8, 3) == datetime_detail::month_names[i]) mo = int(i) + 1;
  int y, d, h, mi, sec;
  if (mo == 0 || !parse_uint(s.substr(5, 2), d) || !parse_uint(s.substr(12, 4), y) ||
      !parse_uint(s.substr(17, 2), h) || !parse_uint(s.substr(20, 2), mi) ||
      !parse_uint(s.substr(23, 2), sec))
    return std::nullopt;
  return datetime_detail::make(y, mo, d, h, mi, sec);
}

inline std::string format_http_date(timestamp t) {
  const auto c = datetime_detail::split(t);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s, %02d %s %04d %02d:%02d:%02d GMT",
                datetime_detail::weekday_names[c.weekday].data(), c.day,
                datetime_detail::month_names[c.month - 1].data(), c.year, c.hour, c.minute,
                c.second);
  return buf;
}

/// "YYYY-MM-DDThh:mm:ssZ" (also accepts a "+00:00" suffix).
inline std::optional<timestamp> parse_iso8601(std::string_view s) {
  using datetime_detail::parse_uint;
  if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':')
    return std::nullopt;
  const auto zone = s.substr(19);
  if (zone != "Z" && zone != "+00:00") return std::nullopt;
  int y, mo, d, h, mi, sec;
  if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(5, 2), mo) ||
      !parse_uint(s.substr(8, 2), d) || !parse_uint(s.substr(11, 2), h) ||
      !parse_uint(s.substr(14, 2), mi) || !parse_uint(s.substr(17, 2), sec))
    return std::nullopt;
  return datetime_detail::make(y, mo, d, h, mi, sec);
}

inline std::string format_iso8601(timestamp t) {
  const auto c = datetime_detail::split(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day,
                c.hour, c.minute, c.second);
  return buf;
}

/// Accepts either RFC 1123 or ISO 8601 UTC.
inline std::optional<timestamp> parse_datetime(std::string_view s) {
  if (auto t = parse_http_date(s)) return t;
  return parse_iso8601(s);
}

inline std::optional<date> parse_date(std::string_view s) {
  using datetime_detail::parse_uint;
  int y, mo, d;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !parse_uint(s.substr(0, 4), y) ||
      !parse_uint(s.substr(5, 2), mo) || !parse_uint(s.substr(8, 2), d))
    return std::nullopt;
  const auto t = datetime_detail::make(y, mo, d, 0, 0, 0);
  if (!t) return std::nullopt;
  return std::chrono::floor<std::chrono::days>(*t);
}

inline std::string format_date(date d) {
  const auto c = datetime_detail::split(timestamp{d});
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

inline date date_of(timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

/// "HH:MM" or "HH:MMZ" as an offset from midnight UTC.
inline std::optional<std::chrono::seconds> parse_time_of_day(std::string_view s) {
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
  int h, m;
  if (s.size() != 5 || s[2] != ':' || !datetime_detail::parse_uint(s.substr(0, 2), h) ||
      !datetime_detail::parse_uint(s.substr(3, 2), m) || h > 23 || m > 59)
    return std::nullopt;
  return std::chrono::hours{h} + std::chrono::minutes{m};
}

inline std::string format_time_of_day(std::chrono::seconds tod) {
  const auto total = tod.count() / 60;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02dZ", int(total / 60), int(total % 60));
  return buf;
}

/// Fixed UTC offset: "-5", "+5", "-05:00", "+5:30", "0".
inline std::optional<std::chrono::minutes> parse_utc_offset(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int sign = 1;
  if (s.front() == '+' || s.front() == '-') {
    if (s.front() == '-') sign = -1;
    s.remove_prefix(1);
  }
  int h = 0, m = 0;
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    if (s.size() > 2 || !datetime_detail::parse_uint(s, h)) return std::nullopt;
  } else {
    if (colon == 0 || colon > 2 || s.size() - colon != 3 ||
        !datetime_detail::parse_uint(s.substr(0, colon), h) ||
        !datetime_detail::parse_uint(s.substr(colon + 1), m) || m > 59)
      return std::nullopt;
  }
  if (h > 14) return std::nullopt;
  return std::chrono::minutes{sign * (h * 60 + m)};
}

inline std::string format_utc_offset(std::chrono::minutes off) {
  const auto v = off.count();
  const auto a = v < 0 ? -v : v;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", v < 0 ? '-' : '+', int(a / 60), int(a % 60));
  return buf;
}

}  // namespace topnews
