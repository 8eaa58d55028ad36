#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "datetime.hpp"
#include "error.hpp"
#include "html.hpp"
#include "selector.hpp"
#include "uri.hpp"

namespace topnews {

inline constexpr std::string_view default_archive_base = "https://web.archive.org";

/// Date-scoped extraction rules for one site. Absent bounds are open;
/// both bounds are inclusive UTC dates.
struct rule_set {
  std::string name;
  std::optional<date> valid_from;
  std::optional<date> valid_to;
  int priority = 0;
  std::vector<std::string> hero_selectors;
  std::vector<std::string> headline_selectors;
  std::string link_attribute = "href";
  std::optional<std::string> title_attribute;  // nullopt: element text

  bool covers(date d) const {
    return (!valid_from || *valid_from <= d) && (!valid_to || d <= *valid_to);
  }
  bool unbounded() const { return !valid_from && !valid_to; }
};

struct site_config {
  std::string site_id;
  std::string homepage_uri;
  std::vector<rule_set> rule_sets;      // highest priority first
  std::optional<std::size_t> max_stories;  // per-site cap below k; none by default
};

/// Throws errc::invalid_config or errc::invalid_selector when the config
/// breaks its invariants. Sorts rule sets by descending priority (stable).
inline void validate(site_config& cfg) {
  const auto fail = [&](const std::string& why) {
    throw error(errc::invalid_config, "site \"" + cfg.site_id + "\": " + why);
  };
  if (cfg.site_id.empty()) fail("empty site_id");
  if (!uri::is_absolute(cfg.homepage_uri) || !uri::is_http(cfg.homepage_uri))
    fail("homepage_uri must be an absolute http(s) URI");
  if (cfg.rule_sets.empty()) fail("no rule sets");
  if (cfg.max_stories && *cfg.max_stories == 0) fail("max_stories must be >= 1");
  bool has_default = false;
  for (const auto& rs : cfg.rule_sets) {
    if (rs.hero_selectors.empty() && rs.headline_selectors.empty())
      fail("rule set \"" + rs.name + "\" has no selectors");
    if (rs.valid_from && rs.valid_to && *rs.valid_from > *rs.valid_to)
      fail("rule set \"" + rs.name + "\" has valid_from after valid_to");
    if (rs.link_attribute.empty()) fail("rule set \"" + rs.name + "\" has an empty link_attribute");
    for (const auto& s : rs.hero_selectors) css::selector{s};
    for (const auto& s : rs.headline_selectors) css::selector{s};
    has_default = has_default || rs.unbounded();
  }
  if (!has_default) fail("no rule set with an unbounded date range");
  std::stable_sort(cfg.rule_sets.begin(), cfg.rule_sets.end(),
                   [](const rule_set& a, const rule_set& b) { return a.priority > b.priority; });
}

/// Highest-priority rule set whose range contains `capture_date`; among
/// equal priorities the earlier configured one wins.
inline const rule_set& resolve_rules(const site_config& cfg, date capture_date) {
  const rule_set* best = nullptr;
  for (const auto& rs : cfg.rule_sets)
    if (rs.covers(capture_date) && (!best || rs.priority > best->priority)) best = &rs;
  if (!best)
    throw error(errc::no_applicable_rules,
                "site \"" + cfg.site_id + "\" has no rule set for " + format_date(capture_date));
  return *best;
}

struct story {
  int rank = 0;
  std::string title;
  std::string uri;           // archive replay URI
  std::string original_uri;  // live-web URI
  bool is_hero = false;
  std::string site_id;
  timestamp capture_datetime{};

  friend bool operator==(const story&, const story&) = default;
};

struct replay_uri {
  std::string prefix;  // scheme://authority of the archive
  timestamp datetime;
  std::string original;
};

/// Splits `<archive>/web/<14 digits>[modifier_]/<original>` when the host
/// matches the archive. A recognised replay path whose tail is not an
/// absolute URI raises errc::malformed_archive_uri.
inline std::optional<replay_uri> parse_replay_uri(std::string_view u, std::string_view archive_base) {
  const auto c = uri::split(u);
  if (!c.scheme || !c.authority || uri::host_of(u) != uri::host_of(archive_base)) return std::nullopt;
  if (c.path.rfind("/web/", 0) != 0) return std::nullopt;
  const auto prefix_len = c.scheme->size() + 3 + c.authority->size();
  std::string_view rest = u.substr(prefix_len + 5);
  if (rest.size() < 15) return std::nullopt;
  const auto when = parse_timestamp14(rest.substr(0, 14));
  if (!when) return std::nullopt;
  rest.remove_prefix(14);
  std::size_t mod = 0;
  while (mod < rest.size() && std::isalpha(static_cast<unsigned char>(rest[mod]))) ++mod;
  if (mod > 0) {
    if (mod >= rest.size() || rest[mod] != '_') return std::nullopt;
    rest.remove_prefix(mod + 1);
  }
  if (rest.empty() || rest.front() != '/') return std::nullopt;
  rest.remove_prefix(1);
  if (!uri::is_absolute(rest))
    throw error(errc::malformed_archive_uri, "archive URI tail is not absolute: " + std::string(u));
  return replay_uri{std::string(u.substr(0, prefix_len)), *when, std::string(rest)};
}

struct archive_location {
  std::string archive_uri;
  std::string original_uri;
};

/// Maps an absolute link to its (archive, original) pair. Replay URIs are
/// split; anything else is treated as an original and re-rooted in the
/// archive at `capture`.
inline archive_location normalize_story_uri(std::string_view u, std::string_view archive_base, timestamp capture) {
  if (auto r = parse_replay_uri(u, archive_base)) return {std::string(u), std::move(r->original)};
  std::string base(archive_base);
  while (!base.empty() && base.back() == '/') base.pop_back();
  return {base + "/web/" + format_timestamp14(capture) + "/" + std::string(u), std::string(u)};
}

namespace extract_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\f");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\f");
  return std::string(s.substr(b, e - b + 1));
}

// Own attribute, else first descendant carrying it, else nearest ancestor.
inline const std::string* find_link(const html::node& n, const std::string& attr) {
  if (const auto* v = n.attr(attr)) return v;
  const std::string* found = nullptr;
  html::for_each_node(n, [&](const html::node& c) {
    if (!found && c.is_element() && &c != &n) found = c.attr(attr);
  });
  if (found) return found;
  for (const auto* p = n.parent; p && p->is_element(); p = p->parent)
    if (const auto* v = p->attr(attr)) return v;
  return nullptr;
}

// Relative references resolve against the memento URI; when that lands in
// the archive host outside the replay namespace the reference was never
// rewritten, so it resolves against the original page instead.
inline std::string resolve_link(std::string_view ref, std::string_view base_uri, std::string_view archive_base) {
  std::string resolved = uri::resolve(base_uri, ref);
  if (parse_replay_uri(resolved, archive_base)) return resolved;
  if (uri::host_of(resolved) == uri::host_of(archive_base) && !uri::split(ref).scheme)
    if (auto base = parse_replay_uri(base_uri, archive_base)) return uri::resolve(base->original, ref);
  return resolved;
}

}  // namespace extract_detail

/// Ordered top stories from a homepage memento.
///
/// Hero selectors are tried in configured order and the first element
/// yielding a story is rank 1. Headline selectors follow, each contributing
/// its matches in document order. Stories are deduplicated on the
/// normalized original URI (first occurrence kept), then truncated to k
/// (and the site's max_stories, if set). Without a hero match the first
/// headline becomes the hero. Throws errc::no_stories_extracted when
/// nothing matches.
inline std::vector<story> extract_stories(std::string_view html_bytes, const site_config& cfg,
                                          timestamp capture_datetime, std::string_view base_uri,
                                          std::size_t k,
                                          std::string_view archive_base = default_archive_base) {
  if (k < 1) throw error(errc::invalid_argument, "k must be >= 1");
  const auto& rules = resolve_rules(cfg, date_of(capture_datetime));
  const html::document doc(html_bytes);
  const auto limit = cfg.max_stories ? std::min(k, *cfg.max_stories) : k;

  std::vector<story> stories;
  std::set<std::string> seen;
  const auto try_add = [&](const html::node& el) {
    std::string title;
    if (rules.title_attribute) {
      if (const auto* v = el.attr(*rules.title_attribute)) title = html::collapse_whitespace(*v);
    } else {
      title = html::collapse_whitespace(html::text_content(el));
    }
    if (title.empty()) return false;
    const auto* href = extract_detail::find_link(el, rules.link_attribute);
    if (!href) return false;
    const auto ref = extract_detail::trim(*href);
    if (ref.empty() || ref.front() == '#') return false;
    archive_location loc;
    try {
      const auto resolved = extract_detail::resolve_link(ref, base_uri, archive_base);
      if (!uri::is_http(resolved) || !uri::is_absolute(resolved)) return false;
      loc = normalize_story_uri(resolved, archive_base, capture_datetime);
    } catch (const error& e) {
      if (e.code() == errc::malformed_archive_uri) return false;
      throw;
    }
    if (!uri::is_http(loc.original_uri)) return false;
    if (!seen.insert(uri::dedup_key(loc.original_uri)).second) return false;
    story s;
    s.title = std::move(title);
    s.uri = std::move(loc.archive_uri);
    s.original_uri = std::move(loc.original_uri);
    s.site_id = cfg.site_id;
    s.capture_datetime = capture_datetime;
    stories.push_back(std::move(s));
    return true;
  };

  for (const auto& sel_text : rules.hero_selectors) {
    const css::selector sel(sel_text);
    bool found = false;
    for (const auto* el : sel.select(doc.root()))
      if ((found = try_add(*el))) break;
    if (found) break;
  }
  for (const auto& sel_text : rules.headline_selectors) {
    const css::selector sel(sel_text);
    for (const auto* el : sel.select(doc.root())) {
      if (stories.size() >= limit) break;
      try_add(*el);
    }
  }
  if (stories.empty())
    throw error(errc::no_stories_extracted, "no stories extracted for site \"" + cfg.site_id + "\" at " +
                                                format_iso8601(capture_datetime));
  if (stories.size() > limit) stories.resize(limit);
  for (std::size_t i = 0; i < stories.size(); ++i) {
    stories[i].rank = static_cast<int>(i + 1);
    stories[i].is_hero = i == 0;
  }
  return stories;
}

}  // namespace topnews
