#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cache.hpp"
#include "datetime.hpp"
#include "error.hpp"
#include "extractor.hpp"
#include "text.hpp"
#include "transport.hpp"

namespace topnews {

inline constexpr int config_schema_version = 1;

/// Everything a run needs. Defaults follow the 8 PM Eastern (01:00Z)
/// sampling and k = {1, 3, 10}.
struct run_config {
  std::vector<site_config> sites;
  std::string archive_base{default_archive_base};
  std::string timemap_template = "{archive}/web/timemap/link/{uri}";

  date from{};
  date to{};
  std::chrono::seconds target_time = std::chrono::hours{1};  // UTC time of day
  std::chrono::minutes utc_offset{-5 * 60};                  // display zone for reports
  std::vector<std::size_t> k_values{1, 3, 10};
  std::optional<std::chrono::seconds> max_offset;  // reject mementos further than this

  std::filesystem::path cache_dir = "cache";
  std::filesystem::path clean_dir;  // empty: <cache_dir>/clean
  std::filesystem::path out_dir = "out";
  bool offline = false;
  bool force = false;
  bool dump_matrices = false;

  fetch_policy fetch;
  std::size_t parallelism = 4;
  std::chrono::milliseconds min_host_interval{1000};

  // Reserved: also mask pairs of documents from the same site. Off by default.
  bool mask_intra_site_pairs = false;
  boilerplate_options boilerplate;

  std::filesystem::path effective_clean_dir() const {
    return clean_dir.empty() ? cache_dir / "clean" : clean_dir;
  }
};

inline std::string timemap_uri(const run_config& cfg, const site_config& site) {
  std::string base = cfg.archive_base;
  while (!base.empty() && base.back() == '/') base.pop_back();
  std::string out = cfg.timemap_template;
  for (const auto& [key, value] : {std::pair<std::string, std::string>{"{archive}", base}, {"{uri}", site.homepage_uri}}) {
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
      out.replace(pos, key.size(), value);
  }
  return out;
}

/// "HH:MMZ" is UTC; a bare "HH:MM" is local time at `utc_offset`. The
/// result is the UTC time of day.
inline std::optional<std::chrono::seconds> parse_target_time(std::string_view s, std::chrono::minutes utc_offset) {
  const auto t = parse_time_of_day(s);
  if (!t) return std::nullopt;
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) return t;
  const auto day = std::chrono::seconds{std::chrono::days{1}};
  auto utc = (*t - std::chrono::seconds{utc_offset}) % day;
  if (utc < std::chrono::seconds{0}) utc += day;
  return utc;
}

inline std::vector<date> dates_in(const run_config& cfg) {
  std::vector<date> out;
  for (auto d = cfg.from; d <= cfg.to; d += std::chrono::days{1}) out.push_back(d);
  return out;
}

/// Checks cross-field invariants; sorts and dedups k_values.
inline void validate(run_config& cfg) {
  const auto fail = [](const std::string& why) { throw error(errc::invalid_config, why); };
  if (cfg.sites.empty()) fail("no sites configured");
  std::set<std::string> ids;
  for (auto& s : cfg.sites) {
    validate(s);
    if (!ids.insert(s.site_id).second) fail("duplicate site_id \"" + s.site_id + "\"");
  }
  if (!uri::is_absolute(cfg.archive_base)) fail("archive base must be an absolute URI");
  if (cfg.timemap_template.find("{uri}") == std::string::npos) fail("timemap_template lacks {uri}");
  if (cfg.to < cfg.from) fail("date range is empty");
  if (cfg.k_values.empty()) fail("no k values");
  std::sort(cfg.k_values.begin(), cfg.k_values.end());
  cfg.k_values.erase(std::unique(cfg.k_values.begin(), cfg.k_values.end()), cfg.k_values.end());
  if (cfg.k_values.front() < 1) fail("k values must be >= 1");
  if (cfg.fetch.max_redirects < 0) fail("max_redirects must be >= 0");
  if (cfg.parallelism < 1) fail("parallelism must be >= 1");
}

namespace config_detail {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw error(errc::invalid_config, where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw error(errc::invalid_config, "unknown key \"" + key + "\" in " + where);
}

inline date get_date(const json& j, const std::string& where) {
  const auto d = parse_date(j.get<std::string>());
  if (!d) throw error(errc::invalid_config, "bad date in " + where + ": " + j.dump());
  return *d;
}

inline std::vector<std::string> get_strings(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<std::string>>();
}

inline rule_set parse_rule_set(const json& j, const std::string& where) {
  check_keys(j, {"name", "valid_from", "valid_to", "priority", "hero_selectors", "headline_selectors",
                 "link_attribute", "title_source"},
             where);
  rule_set rs;
  rs.name = j.value("name", "");
  if (j.contains("valid_from") && !j.at("valid_from").is_null()) rs.valid_from = get_date(j.at("valid_from"), where);
  if (j.contains("valid_to") && !j.at("valid_to").is_null()) rs.valid_to = get_date(j.at("valid_to"), where);
  rs.priority = j.value("priority", 0);
  rs.hero_selectors = get_strings(j, "hero_selectors");
  rs.headline_selectors = get_strings(j, "headline_selectors");
  rs.link_attribute = j.value("link_attribute", "href");
  const std::string title = j.value("title_source", "text");
  if (title.rfind("attr:", 0) == 0 && title.size() > 5) {
    rs.title_attribute = title.substr(5);
  } else if (title != "text") {
    throw error(errc::invalid_config, "title_source must be \"text\" or \"attr:<name>\" in " + where);
  }
  return rs;
}

inline site_config parse_site(const json& j, std::size_t index) {
  const std::string where = "sites[" + std::to_string(index) + "]";
  check_keys(j, {"site_id", "homepage_uri", "rule_sets", "max_stories"}, where);
  site_config s;
  s.site_id = j.at("site_id").get<std::string>();
  s.homepage_uri = j.at("homepage_uri").get<std::string>();
  if (j.contains("max_stories") && !j.at("max_stories").is_null())
    s.max_stories = j.at("max_stories").get<std::size_t>();
  const auto& rules = j.at("rule_sets");
  for (std::size_t i = 0; i < rules.size(); ++i)
    s.rule_sets.push_back(parse_rule_set(rules[i], where + ".rule_sets[" + std::to_string(i) + "]"));
  return s;
}

inline void parse_run(const json& j, run_config& cfg) {
  check_keys(j, {"from", "to", "target_time", "utc_offset", "k", "cache_dir", "clean_dir", "out_dir",
                 "offline", "max_offset_minutes", "max_redirects", "timeout_seconds", "parallelism",
                 "min_host_interval_ms", "mask_intra_site_pairs", "min_block_words", "max_link_density"},
             "run");
  if (j.contains("from")) cfg.from = get_date(j.at("from"), "run.from");
  if (j.contains("to")) cfg.to = get_date(j.at("to"), "run.to");
  if (j.contains("utc_offset")) {
    const auto off = parse_utc_offset(j.at("utc_offset").get<std::string>());
    if (!off) throw error(errc::invalid_config, "bad run.utc_offset");
    cfg.utc_offset = *off;
  }
  if (j.contains("target_time")) {
    const auto t = parse_target_time(j.at("target_time").get<std::string>(), cfg.utc_offset);
    if (!t) throw error(errc::invalid_config, "bad run.target_time");
    cfg.target_time = *t;
  }
  if (j.contains("k")) cfg.k_values = j.at("k").get<std::vector<std::size_t>>();
  if (j.contains("cache_dir")) cfg.cache_dir = j.at("cache_dir").get<std::string>();
  if (j.contains("clean_dir")) cfg.clean_dir = j.at("clean_dir").get<std::string>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  cfg.offline = j.value("offline", cfg.offline);
  if (j.contains("max_offset_minutes") && !j.at("max_offset_minutes").is_null())
    cfg.max_offset = std::chrono::seconds{static_cast<long long>(j.at("max_offset_minutes").get<double>() * 60.0)};
  cfg.fetch.max_redirects = j.value("max_redirects", cfg.fetch.max_redirects);
  if (j.contains("timeout_seconds"))
    cfg.fetch.timeout = std::chrono::milliseconds{static_cast<long long>(j.at("timeout_seconds").get<double>() * 1000.0)};
  cfg.parallelism = j.value("parallelism", cfg.parallelism);
  if (j.contains("min_host_interval_ms"))
    cfg.min_host_interval = std::chrono::milliseconds{j.at("min_host_interval_ms").get<long long>()};
  cfg.mask_intra_site_pairs = j.value("mask_intra_site_pairs", cfg.mask_intra_site_pairs);
  cfg.boilerplate.min_words = j.value("min_block_words", cfg.boilerplate.min_words);
  cfg.boilerplate.max_link_density = j.value("max_link_density", cfg.boilerplate.max_link_density);
}

}  // namespace config_detail

/// Parses a config document (schema documented in docs/config-schema.md).
/// Relative paths in "run" are taken relative to `base_dir`. The result is
/// not validated; CLI overrides are applied first, then validate().
inline run_config parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using config_detail::check_keys;
  try {
    check_keys(j, {"schema_version", "archive", "sites", "run", "notes"}, "config");
    const int version = j.value("schema_version", 0);
    if (version != config_schema_version)
      throw error(errc::invalid_config, "unsupported schema_version " + std::to_string(version) +
                                            " (expected " + std::to_string(config_schema_version) + ")");
    run_config cfg;
    if (j.contains("archive")) {
      const auto& a = j.at("archive");
      check_keys(a, {"base", "timemap_template"}, "archive");
      cfg.archive_base = a.value("base", cfg.archive_base);
      cfg.timemap_template = a.value("timemap_template", cfg.timemap_template);
    }
    const auto& sites = j.at("sites");
    if (!sites.is_array()) throw error(errc::invalid_config, "sites must be an array");
    for (std::size_t i = 0; i < sites.size(); ++i) cfg.sites.push_back(config_detail::parse_site(sites[i], i));
    if (j.contains("run")) config_detail::parse_run(j.at("run"), cfg);
    for (auto* p : {&cfg.cache_dir, &cfg.clean_dir, &cfg.out_dir})
      if (!p->empty() && p->is_relative() && !base_dir.empty()) *p = base_dir / *p;
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::invalid_config, std::string("config: ") + e.what());
  }
}

inline run_config load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const error&) {
    throw error(errc::invalid_config, "cannot read config " + path.string());
  }
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw error(errc::invalid_config, "config is not valid JSON: " + path.string());
  return parse_config(j, path.parent_path());
}

}  // namespace topnews
