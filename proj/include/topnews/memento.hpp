#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "datetime.hpp"
#include "error.hpp"
#include "uri.hpp"

namespace topnews {

struct memento_record {
  std::string uri_m;
  std::string original_uri;
  timestamp capture_datetime;

  friend bool operator==(const memento_record&, const memento_record&) = default;
};

/// All mementos of one original URI, ascending by capture datetime.
struct timemap {
  std::string original_uri;
  std::vector<memento_record> mementos;
};

/// One link-value from an RFC 6690 / RFC 7089 link-format document.
struct link_value {
  std::string target;
  std::vector<std::pair<std::string, std::string>> params;

  std::optional<std::string> param(std::string_view name) const {
    for (const auto& [k, v] : params)
      if (k == name) return v;
    return std::nullopt;
  }

  bool has_rel(std::string_view rel) const {
    const auto r = param("rel");
    if (!r) return false;
    std::string_view rest = *r;
    while (!rest.empty()) {
      const auto sp = rest.find_first_of(" \t\r\n");
      const auto tok = rest.substr(0, sp);
      if (uri::to_lower(tok) == rel) return true;
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    return false;
  }
};

namespace timemap_detail {

inline bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

[[noreturn]] inline void malformed(const std::string& why, std::size_t pos) {
  throw error(errc::malformed_timemap,
              "malformed link-format at offset " + std::to_string(pos) + ": " + why);
}

// 14-digit timestamp found as a whole path segment, optionally followed by
// a replay modifier such as "id_".
inline std::optional<timestamp> path_timestamp(std::string_view uri_m) {
  const auto c = uri::split(uri_m);
  std::string_view path = c.path;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    const auto slash = path.find('/');
    auto seg = path.substr(0, slash);
    if (seg.size() >= 14) {
      auto digits = seg.substr(0, 14);
      auto mod = seg.substr(14);
      const bool mod_ok = mod.empty() || (mod.size() >= 2 && mod.back() == '_' &&
                                          std::all_of(mod.begin(), mod.end() - 1, [](char ch) {
                                            return std::isalpha(static_cast<unsigned char>(ch));
                                          }));
      if (mod_ok)
        if (auto t = parse_timestamp14(digits)) return t;
    }
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash);
  }
  return std::nullopt;
}

}  // namespace timemap_detail

/// Tokenizes link-format text into link-values. Throws
/// errc::malformed_timemap on grammar violations.
inline std::vector<link_value> parse_link_format(std::string_view body) {
  using timemap_detail::is_ws;
  using timemap_detail::malformed;
  std::vector<link_value> links;
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < body.size() && is_ws(body[i])) ++i;
  };
  while (true) {
    skip_ws();
    while (i < body.size() && body[i] == ',') {
      ++i;
      skip_ws();
    }
    if (i >= body.size()) break;
    if (body[i] != '<') malformed("expected '<'", i);
    const auto close = body.find('>', i + 1);
    if (close == std::string_view::npos) malformed("unterminated URI reference", i);
    link_value link;
    link.target = std::string(body.substr(i + 1, close - i - 1));
    i = close + 1;
    while (true) {
      skip_ws();
      if (i >= body.size() || body[i] == ',') break;
      if (body[i] != ';') malformed("expected ';' or ','", i);
      ++i;
      skip_ws();
      const auto name_start = i;
      while (i < body.size() && !is_ws(body[i]) && body[i] != '=' && body[i] != ';' &&
             body[i] != ',')
        ++i;
      if (i == name_start) malformed("empty parameter name", i);
      std::string name = uri::to_lower(body.substr(name_start, i - name_start));
      skip_ws();
      std::string value;
      if (i < body.size() && body[i] == '=') {
        ++i;
        skip_ws();
        if (i < body.size() && body[i] == '"') {
          ++i;
          bool closed = false;
          while (i < body.size()) {
            const char c = body[i++];
            if (c == '\\' && i < body.size()) {
              value.push_back(body[i++]);
            } else if (c == '"') {
              closed = true;
              break;
            } else {
              value.push_back(c);
            }
          }
          if (!closed) malformed("unterminated quoted string", i);
        } else {
          const auto vstart = i;
          while (i < body.size() && !is_ws(body[i]) && body[i] != ';' && body[i] != ',') ++i;
          value = std::string(body.substr(vstart, i - vstart));
        }
      }
      link.params.emplace_back(std::move(name), std::move(value));
    }
    links.push_back(std::move(link));
  }
  return links;
}

/// Parses an RFC 7089 TimeMap. Only entries whose rel includes "memento"
/// are kept; the result is sorted ascending and exact duplicates dropped.
inline timemap parse_timemap(std::string_view body, std::string_view original_uri) {
  timemap tm;
  tm.original_uri = std::string(original_uri);
  for (const auto& link : parse_link_format(body)) {
    if (!link.has_rel("memento")) continue;
    if (!uri::is_absolute(link.target))
      throw error(errc::malformed_timemap, "memento URI is not absolute: " + link.target);
    const auto from_path = timemap_detail::path_timestamp(link.target);
    std::optional<timestamp> from_attr;
    if (const auto dt = link.param("datetime")) {
      from_attr = parse_datetime(*dt);
      if (!from_attr) throw error(errc::malformed_timemap, "unparseable datetime: " + *dt);
    }
    if (from_attr && from_path && *from_attr != *from_path)
      throw error(errc::malformed_timemap,
                  "datetime attribute disagrees with path timestamp: " + link.target);
    if (!from_attr && !from_path)
      throw error(errc::malformed_timemap, "memento without datetime: " + link.target);
    tm.mementos.push_back({link.target, tm.original_uri, from_attr ? *from_attr : *from_path});
  }
  if (tm.mementos.empty())
    throw error(errc::empty_timemap, "TimeMap has no mementos for " + tm.original_uri);
  std::stable_sort(tm.mementos.begin(), tm.mementos.end(), [](const auto& a, const auto& b) {
    return a.capture_datetime < b.capture_datetime;
  });
  // Equal datetimes keep document order; drop records identical in both keys.
  std::vector<memento_record> unique;
  unique.reserve(tm.mementos.size());
  for (auto& m : tm.mementos) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend() && it->capture_datetime == m.capture_datetime; ++it)
      dup = dup || it->uri_m == m.uri_m;
    if (!dup) unique.push_back(std::move(m));
  }
  tm.mementos = std::move(unique);
  return tm;
}

inline std::string serialize_timemap(const timemap& tm) {
  std::string out = "<" + tm.original_uri + ">; rel=\"original\"";
  for (const auto& m : tm.mementos) {
    out += ",\n<" + m.uri_m + ">; rel=\"memento\"; datetime=\"" +
           format_http_date(m.capture_datetime) + "\"";
  }
  out += "\n";
  return out;
}

/// The memento closest to `target`; ties go to the earlier capture.
/// With `max_offset` set, a best candidate further away than that raises
/// errc::offset_exceeded.
inline memento_record select_nearest(const timemap& tm, timestamp target,
                                     std::optional<std::chrono::seconds> max_offset = {}) {
  const auto& ms = tm.mementos;
  if (ms.empty()) throw error(errc::empty_timemap, "TimeMap has no mementos for " + tm.original_uri);
  auto after = std::lower_bound(ms.begin(), ms.end(), target, [](const memento_record& m, timestamp t) {
    return m.capture_datetime < t;
  });
  auto best = after;
  if (after == ms.end()) {
    best = std::prev(after);
  } else if (after != ms.begin()) {
    auto before = std::prev(after);
    if (target - before->capture_datetime <= after->capture_datetime - target) best = before;
  }
  // First record among equal datetimes.
  while (best != ms.begin() && std::prev(best)->capture_datetime == best->capture_datetime) --best;
  if (max_offset) {
    const auto d = best->capture_datetime > target ? best->capture_datetime - target
                                                   : target - best->capture_datetime;
    if (d > *max_offset)
      throw error(errc::offset_exceeded, "nearest memento of " + tm.original_uri + " is " +
                                             std::to_string(d.count()) + "s from target");
  }
  return *best;
}

struct hour_histogram {
  std::array<std::size_t, 24> counts{};
  std::size_t total = 0;

  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
};

/// Mementos per local hour-of-day after shifting by the fixed `utc_offset`.
/// When `month` is set only captures whose local date falls in it count.
inline hour_histogram archival_histogram(std::span<const timemap> tms,
                                         std::optional<std::chrono::year_month> month,
                                         std::chrono::minutes utc_offset) {
  using namespace std::chrono;
  hour_histogram h;
  for (const auto& tm : tms) {
    for (const auto& m : tm.mementos) {
      const auto local = m.capture_datetime + utc_offset;
      const auto day = floor<days>(local);
      if (month) {
        const year_month_day ymd{day};
        if (ymd.year() != month->year() || ymd.month() != month->month()) continue;
      }
      const auto hour = floor<hours>(local - day).count();
      ++h.counts[static_cast<std::size_t>(hour)];
      ++h.total;
    }
  }
  return h;
}

struct selection {
  memento_record selected;
  timestamp target;
};

inline double offset_minutes(const selection& s) {
  return static_cast<double>((s.selected.capture_datetime - s.target).count()) / 60.0;
}

struct offset_summary {
  std::vector<double> offsets_minutes;
  double min = 0;
  double mean = 0;
  double max = 0;
};

inline offset_summary offset_stats(std::span<const selection> selections) {
  if (selections.empty()) throw error(errc::empty_input, "offset_stats needs at least one selection");
  offset_summary out;
  out.offsets_minutes.reserve(selections.size());
  double sum = 0;
  for (const auto& s : selections) {
    const double off = offset_minutes(s);
    out.offsets_minutes.push_back(off);
    sum += off;
  }
  const auto [lo, hi] = std::minmax_element(out.offsets_minutes.begin(), out.offsets_minutes.end());
  out.min = *lo;
  out.max = *hi;
  out.mean = sum / static_cast<double>(selections.size());
  return out;
}

/// min, lower quartile, median, upper quartile, max. Quartiles use linear
/// interpolation between order statistics.
struct five_number {
  double min, q1, median, q3, max;
};

inline five_number five_number_summary(std::vector<double> values) {
  if (values.empty()) throw error(errc::empty_input, "five_number_summary needs values");
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

}  // namespace topnews
