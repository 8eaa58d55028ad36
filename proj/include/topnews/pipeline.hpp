#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cache.hpp"
#include "config.hpp"
#include "error.hpp"
#include "extractor.hpp"
#include "memento.hpp"
#include "similarity.hpp"
#include "text.hpp"
#include "transport.hpp"

namespace topnews {

/// How far a day is taken: stories only, stories plus their documents, or
/// the full scoring.
enum class stage { extract, fetch, score };

inline constexpr std::string_view status_ok = "ok";

struct story_outcome {
  story item;
  std::string status = "not-fetched";  // "ok" or a reason code
  int http_status = 0;
  std::string final_uri;
  std::size_t token_count = 0;
  std::string text;  // clean document text; not serialized

  friend bool operator==(const story_outcome&, const story_outcome&) = default;
};

struct site_day {
  std::string site_id;
  std::string status{status_ok};
  std::string failed_stage;  // timemap, select, homepage or extract
  std::string detail;
  int http_status = 0;
  std::string timemap_uri;
  timestamp target{};
  std::optional<memento_record> selected;
  std::optional<double> offset_minutes;
  std::string rule_set;
  std::vector<story_outcome> stories;

  bool ok() const { return status == status_ok; }
  friend bool operator==(const site_day&, const site_day&) = default;
};

struct excluded_uri {
  std::string uri;
  std::string site_id;
  int rank = 0;
  std::string reason;
  int http_status = 0;

  friend bool operator==(const excluded_uri&, const excluded_uri&) = default;
};

struct k_result {
  std::size_t k = 0;
  std::optional<double> score;
  std::size_t n_documents = 0;
  std::size_t n_attempted = 0;
  std::vector<excluded_uri> excluded;
  std::string note;  // why score is null

  friend bool operator==(const k_result&, const k_result&) = default;
};

struct daily_result {
  date day{};
  std::string status{status_ok};  // "ok" or "day-failed"
  std::vector<k_result> per_k;
  std::vector<site_day> sites;

  bool failed() const { return status != status_ok; }
  friend bool operator==(const daily_result&, const daily_result&) = default;
};

inline std::string reason_of(const error& e) { return std::string(to_string(e.code())); }

/// Runs fn(0..n-1) on up to `workers` threads. The first exception thrown
/// is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Fetches and parses each site's TimeMap at most once per run.
class timemap_store {
 public:
  timemap_store(transport& t, const run_config& cfg) : transport_(t), cfg_(cfg) {}

  /// The site's TimeMap; throws the (cached) fetch or parse error.
  const timemap& get(const site_config& site) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = entries_.find(site.site_id); it != entries_.end()) return unwrap(it->second);
    }
    entry e;
    try {
      const auto r = fetch_memento(transport_, timemap_uri(cfg_, site), cfg_.fetch);
      e = parse_timemap(r.body, site.homepage_uri);
    } catch (const error& err) {
      e = err;
    }
    std::lock_guard lock(mutex_);
    auto [it, _] = entries_.emplace(site.site_id, std::move(e));
    return unwrap(it->second);
  }

 private:
  using entry = std::variant<timemap, error>;

  static const timemap& unwrap(const entry& e) {
    if (const auto* err = std::get_if<error>(&e)) throw *err;
    return std::get<timemap>(e);
  }

  transport& transport_;
  const run_config& cfg_;
  std::mutex mutex_;
  std::map<std::string, entry> entries_;
};

inline void fetch_story_document(const run_config& cfg, transport& t, story_outcome& out) {
  try {
    const auto r = fetch_memento(t, out.item.uri, cfg.fetch);
    out.http_status = r.status;
    out.final_uri = r.final_uri;
    out.text = strip_boilerplate(r.body, cfg.boilerplate);
    out.token_count = tokenize(out.text).size();
    out.status = status_ok;
  } catch (const error& e) {
    out.status = reason_of(e);
    if (e.status() != 0) out.http_status = e.status();
    return;
  }
  const auto dir = cfg.effective_clean_dir();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  write_file_atomic(dir / (sha256_hex(out.item.uri) + ".txt"), out.text);
}

/// One site for one day: TimeMap, nearest memento, homepage, stories and
/// (from stage::fetch on) story documents. Failures are recorded in the
/// returned record, never thrown.
inline site_day process_site(const run_config& cfg, const site_config& site, date day, transport& t,
                             timemap_store& timemaps, stage upto) {
  site_day sd;
  sd.site_id = site.site_id;
  sd.timemap_uri = timemap_uri(cfg, site);
  sd.target = timestamp{day} + cfg.target_time;
  const auto fail = [&](const char* where, const error& e) {
    sd.status = reason_of(e);
    sd.failed_stage = where;
    sd.detail = e.what();
    sd.http_status = e.status();
    return sd;
  };

  const timemap* tm = nullptr;
  try {
    tm = &timemaps.get(site);
  } catch (const error& e) {
    return fail("timemap", e);
  }
  try {
    sd.selected = select_nearest(*tm, sd.target, cfg.max_offset);
  } catch (const error& e) {
    return fail("select", e);
  }
  sd.offset_minutes = offset_minutes({*sd.selected, sd.target});

  fetch_result home;
  try {
    home = fetch_memento(t, sd.selected->uri_m, cfg.fetch);
  } catch (const error& e) {
    return fail("homepage", e);
  }
  try {
    const auto capture = sd.selected->capture_datetime;
    sd.rule_set = resolve_rules(site, date_of(capture)).name;
    for (auto& s : extract_stories(home.body, site, capture, home.final_uri, cfg.k_values.back(), cfg.archive_base))
    {
      story_outcome so;
      so.item = std::move(s);
      sd.stories.push_back(std::move(so));
    }
  } catch (const error& e) {
    return fail("extract", e);
  }
  if (upto >= stage::fetch)
    for (auto& so : sd.stories) fetch_story_document(cfg, t, so);
  return sd;
}

/// Scores one (day, k) corpus: every successfully cleaned story with
/// rank <= k from every healthy site, in config order.
inline k_result score_day_k(const run_config& cfg, date day, std::span<const site_day> sites, std::size_t k,
                            std::optional<similarity_matrix>* matrix_out = nullptr) {
  k_result r;
  r.k = k;
  std::vector<clean_document> docs;
  std::vector<std::string> doc_sites;
  for (const auto& sd : sites) {
    if (!sd.ok()) continue;
    for (const auto& so : sd.stories) {
      if (static_cast<std::size_t>(so.item.rank) > k) continue;
      ++r.n_attempted;
      if (so.status == status_ok) {
        docs.push_back({{sd.site_id, so.item.rank, day}, so.text, so.token_count});
        doc_sites.push_back(sd.site_id);
      } else {
        r.excluded.push_back({so.item.uri, sd.site_id, so.item.rank, so.status, so.http_status});
      }
    }
  }
  r.n_documents = docs.size();
  if (docs.size() < 2) {
    r.note = std::string(to_string(errc::corpus_too_small));
    return r;
  }
  const auto vectors = build_tfidf(make_corpus(std::move(docs)));
  auto d = pairwise_matrix(vectors);
  try {
    if (cfg.mask_intra_site_pairs) {
      const auto n = doc_sites.size();
      std::unique_ptr<bool[]> mask(new bool[n * n]);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mask[i * n + j] = doc_sites[i] != doc_sites[j];
      r.score = score_collection(d, std::span<const bool>(mask.get(), n * n)).s;
    } else {
      r.score = score_collection(d).s;
    }
  } catch (const error& e) {
    if (e.code() != errc::corpus_too_small) throw;
    r.note = reason_of(e);
  }
  if (matrix_out) *matrix_out = std::move(d);
  return r;
}

/// Full pipeline for one date. A day fails (status "day-failed") only when
/// no k yields a corpus of two or more documents.
inline daily_result run_day(const run_config& cfg, date day, transport& t, timemap_store& timemaps,
                            stage upto = stage::score) {
  daily_result out;
  out.day = day;
  out.sites.resize(cfg.sites.size());
  parallel_for(cfg.sites.size(), cfg.parallelism, [&](std::size_t i) {
    out.sites[i] = process_site(cfg, cfg.sites[i], day, t, timemaps, upto);
  });
  if (upto != stage::score) return out;
  bool any = false;
  for (const auto k : cfg.k_values) {
    std::optional<similarity_matrix> matrix;
    out.per_k.push_back(score_day_k(cfg, day, out.sites, k, cfg.dump_matrices ? &matrix : nullptr));
    any = any || out.per_k.back().score.has_value();
    if (matrix) {
      const auto dir = cfg.out_dir / "matrices";
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      std::ostringstream os;
      write_matrix_json(os, matrix->values);
      write_file_atomic(dir / (format_date(day) + "_k" + std::to_string(k) + ".json"), os.str());
    }
  }
  if (!any) out.status = std::string(to_string(errc::day_failed));
  return out;
}

inline daily_result run_day(const run_config& cfg, date day, transport& t, stage upto = stage::score) {
  timemap_store timemaps(t, cfg);
  return run_day(cfg, day, t, timemaps, upto);
}

// ---------------------------------------------------------------------------
// Serialization

namespace pipeline_detail {

using nlohmann::json;

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json story_json(const story_outcome& so) {
  const auto& s = so.item;
  return {{"rank", s.rank},
          {"title", s.title},
          {"uri", s.uri},
          {"original_uri", s.original_uri},
          {"is_hero", s.is_hero},
          {"site_id", s.site_id},
          {"capture_datetime", format_iso8601(s.capture_datetime)},
          {"status", so.status},
          {"http_status", so.http_status},
          {"final_uri", so.final_uri},
          {"token_count", so.token_count}};
}

inline timestamp get_time(const json& j) {
  const auto t = parse_iso8601(j.get<std::string>());
  if (!t) throw error(errc::invalid_argument, "bad timestamp in manifest: " + j.dump());
  return *t;
}

}  // namespace pipeline_detail

inline nlohmann::json to_json(const daily_result& r) {
  using pipeline_detail::json;
  json scores = json::array();
  for (const auto& k : r.per_k) {
    json excluded = json::array();
    for (const auto& e : k.excluded)
      excluded.push_back({{"uri", e.uri}, {"site_id", e.site_id}, {"rank", e.rank}, {"reason", e.reason},
                          {"http_status", e.http_status}});
    scores.push_back({{"k", k.k},
                      {"score", pipeline_detail::opt(k.score)},
                      {"n_documents", k.n_documents},
                      {"n_attempted", k.n_attempted},
                      {"n_excluded", k.excluded.size()},
                      {"excluded", std::move(excluded)},
                      {"note", k.note}});
  }
  json sites = json::array();
  for (const auto& sd : r.sites) {
    json stories = json::array();
    for (const auto& so : sd.stories) stories.push_back(pipeline_detail::story_json(so));
    json selected = nullptr;
    if (sd.selected)
      selected = {{"uri_m", sd.selected->uri_m}, {"datetime", format_iso8601(sd.selected->capture_datetime)}};
    sites.push_back({{"site_id", sd.site_id},
                     {"status", sd.status},
                     {"failed_stage", sd.failed_stage},
                     {"detail", sd.detail},
                     {"http_status", sd.http_status},
                     {"timemap_uri", sd.timemap_uri},
                     {"target", format_iso8601(sd.target)},
                     {"selected", std::move(selected)},
                     {"offset_minutes", pipeline_detail::opt(sd.offset_minutes)},
                     {"rule_set", sd.rule_set},
                     {"stories", std::move(stories)}});
  }
  return {{"date", format_date(r.day)}, {"status", r.status}, {"scores", std::move(scores)}, {"sites", std::move(sites)}};
}

inline daily_result daily_result_from_json(const nlohmann::json& j, const std::string& original_uri_hint = {}) {
  using pipeline_detail::get_time;
  daily_result r;
  const auto d = parse_date(j.at("date").get<std::string>());
  if (!d) throw error(errc::invalid_argument, "bad date in manifest");
  r.day = *d;
  r.status = j.at("status").get<std::string>();
  for (const auto& s : j.at("scores")) {
    k_result k;
    k.k = s.at("k").get<std::size_t>();
    if (!s.at("score").is_null()) k.score = s.at("score").get<double>();
    k.n_documents = s.at("n_documents").get<std::size_t>();
    k.n_attempted = s.at("n_attempted").get<std::size_t>();
    k.note = s.at("note").get<std::string>();
    for (const auto& e : s.at("excluded"))
      k.excluded.push_back({e.at("uri"), e.at("site_id"), e.at("rank"), e.at("reason"), e.at("http_status")});
    r.per_k.push_back(std::move(k));
  }
  for (const auto& s : j.at("sites")) {
    site_day sd;
    sd.site_id = s.at("site_id");
    sd.status = s.at("status");
    sd.failed_stage = s.at("failed_stage");
    sd.detail = s.at("detail");
    sd.http_status = s.at("http_status");
    sd.timemap_uri = s.at("timemap_uri");
    sd.target = get_time(s.at("target"));
    if (!s.at("selected").is_null())
      sd.selected = memento_record{s.at("selected").at("uri_m"), original_uri_hint,
                                   get_time(s.at("selected").at("datetime"))};
    if (!s.at("offset_minutes").is_null()) sd.offset_minutes = s.at("offset_minutes").get<double>();
    sd.rule_set = s.at("rule_set");
    for (const auto& st : s.at("stories")) {
      story_outcome so;
      so.item = story{st.at("rank"), st.at("title"), st.at("uri"), st.at("original_uri"), st.at("is_hero"),
                      st.at("site_id"), get_time(st.at("capture_datetime"))};
      so.status = st.at("status");
      so.http_status = st.at("http_status");
      so.final_uri = st.at("final_uri");
      so.token_count = st.at("token_count");
      sd.stories.push_back(std::move(so));
    }
    r.sites.push_back(std::move(sd));
  }
  return r;
}

/// Parameters that make stored days reusable by a later run.
inline nlohmann::json run_key(const run_config& cfg) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : cfg.sites) sites.push_back(s.site_id);
  return {{"archive", cfg.archive_base},
          {"target_time", format_time_of_day(cfg.target_time)},
          {"k", cfg.k_values},
          {"sites", std::move(sites)},
          {"mask_intra_site_pairs", cfg.mask_intra_site_pairs}};
}

// ---------------------------------------------------------------------------
// Outputs

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline constexpr std::string_view crlf = "\r\n";

inline std::string series_csv(std::span<const daily_result> results) {
  std::string out = "date,k,score,n_documents,n_excluded";
  out += crlf;
  for (const auto& r : results)
    for (const auto& k : r.per_k) {
      out += format_date(r.day) + "," + std::to_string(k.k) + "," + (k.score ? format_fixed(*k.score, 6) : "") +
             "," + std::to_string(k.n_documents) + "," + std::to_string(k.excluded.size());
      out += crlf;
    }
  return out;
}

struct k_summary {
  std::size_t k = 0;
  std::size_t n_days = 0;
  double min = 0, mean = 0, max = 0;
};

inline std::vector<k_summary> summarize(std::span<const daily_result> results) {
  std::map<std::size_t, std::vector<double>> by_k;
  for (const auto& r : results)
    for (const auto& k : r.per_k) {
      auto& v = by_k[k.k];
      if (k.score) v.push_back(*k.score);
    }
  std::vector<k_summary> out;
  for (const auto& [k, v] : by_k) {
    k_summary s{k, v.size()};
    if (!v.empty()) {
      double sum = 0;
      for (double x : v) sum += x;
      s.min = *std::min_element(v.begin(), v.end());
      s.max = *std::max_element(v.begin(), v.end());
      s.mean = sum / static_cast<double>(v.size());
    }
    out.push_back(s);
  }
  return out;
}

inline std::string summary_csv(std::span<const daily_result> results) {
  std::string out = "k,n_days,min,mean,max";
  out += crlf;
  for (const auto& s : summarize(results)) {
    out += std::to_string(s.k) + "," + std::to_string(s.n_days);
    if (s.n_days)
      out += "," + format_fixed(s.min, 6) + "," + format_fixed(s.mean, 6) + "," + format_fixed(s.max, 6);
    else
      out += ",,,";
    out += crlf;
  }
  return out;
}

inline std::string manifest_json(std::span<const daily_result> results, const run_config& cfg) {
  nlohmann::json days = nlohmann::json::array();
  for (const auto& r : results) days.push_back(to_json(r));
  const nlohmann::json doc = {{"schema_version", 1}, {"run", run_key(cfg)}, {"days", std::move(days)}};
  return doc.dump(2) + "\n";
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) throw error(errc::output_unwritable, "cannot create " + dir.string());
}

/// Writes series.csv, summary.csv and manifest.json into cfg.out_dir.
/// Results must be non-empty; nothing is written otherwise.
inline void emit_series(std::span<const daily_result> results, const run_config& cfg) {
  if (results.empty()) throw error(errc::empty_input, "no results to emit");
  ensure_dir(cfg.out_dir);
  write_file_atomic(cfg.out_dir / "series.csv", series_csv(results));
  write_file_atomic(cfg.out_dir / "summary.csv", summary_csv(results));
  write_file_atomic(cfg.out_dir / "manifest.json", manifest_json(results, cfg));
}

/// Writes stories.csv and stories.json (per-site detail without scores).
inline void emit_stories(std::span<const daily_result> results, const run_config& cfg) {
  if (results.empty()) throw error(errc::empty_input, "no results to emit");
  ensure_dir(cfg.out_dir);
  std::string csv = "date,site_id,rank,is_hero,title,uri,original_uri,capture_datetime";
  csv += crlf;
  for (const auto& r : results)
    for (const auto& sd : r.sites)
      for (const auto& so : sd.stories) {
        const auto& s = so.item;
        csv += format_date(r.day) + "," + csv_field(s.site_id) + "," + std::to_string(s.rank) + "," +
               (s.is_hero ? "true" : "false") + "," + csv_field(s.title) + "," + csv_field(s.uri) + "," +
               csv_field(s.original_uri) + "," + format_iso8601(s.capture_datetime);
        csv += crlf;
      }
  write_file_atomic(cfg.out_dir / "stories.csv", csv);
  nlohmann::json days = nlohmann::json::array();
  for (const auto& r : results) days.push_back(to_json(r));
  write_file_atomic(cfg.out_dir / "stories.json", days.dump(2) + "\n");
}

/// Days stored in an existing manifest whose run key matches `cfg`.
inline std::map<date, daily_result> load_manifest(const run_config& cfg) {
  std::map<date, daily_result> out;
  const auto path = cfg.out_dir / "manifest.json";
  if (!std::filesystem::exists(path)) return out;
  const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("run") || j.at("run") != run_key(cfg)) return out;
  try {
    for (const auto& d : j.at("days")) {
      auto r = daily_result_from_json(d);
      out.emplace(r.day, std::move(r));
    }
  } catch (const nlohmann::json::exception&) {
    out.clear();
  }
  return out;
}

/// Runs every date in cfg.from..cfg.to. Days already present in the output
/// manifest are reused unless cfg.force. Outputs are rewritten after each
/// computed day so an interrupted run resumes where it stopped. Returns the
/// results for the configured range, in date order.
inline std::vector<daily_result> run_range(const run_config& cfg, transport& t, stage upto = stage::score) {
  std::map<date, daily_result> all;
  if (upto == stage::score && !cfg.force) all = load_manifest(cfg);
  timemap_store timemaps(t, cfg);
  std::vector<daily_result> range;
  for (const auto day : dates_in(cfg)) {
    if (auto it = all.find(day); it != all.end()) {
      range.push_back(it->second);
      continue;
    }
    auto r = run_day(cfg, day, t, timemaps, upto);
    range.push_back(r);
    if (upto == stage::score) {
      all[day] = std::move(r);
      std::vector<daily_result> ordered;
      for (const auto& [_, v] : all) ordered.push_back(v);
      emit_series(ordered, cfg);
    }
  }
  if (upto == stage::score && !range.empty()) {
    std::vector<daily_result> ordered;
    for (const auto& [_, v] : all) ordered.push_back(v);
    emit_series(ordered, cfg);
  } else if (upto == stage::extract) {
    emit_stories(range, cfg);
  }
  return range;
}

// ---------------------------------------------------------------------------
// Archival report

struct site_archival {
  std::string site_id;
  std::string status{status_ok};
  std::string detail;
  hour_histogram histogram;
  std::vector<double> offsets_minutes;  // one per day in range
  std::optional<five_number> summary;
  double mean = 0.0;
};

struct archival_report {
  std::vector<site_archival> sites;
};

/// Capture-hour histograms (display zone cfg.utc_offset, optionally one
/// month) and the distribution of selected-memento offsets over the run's
/// date range, per site.
inline archival_report report_archival(const run_config& cfg, std::optional<std::chrono::year_month> month,
                                       transport& t) {
  archival_report rep;
  timemap_store timemaps(t, cfg);
  for (const auto& site : cfg.sites) {
    site_archival sa;
    sa.site_id = site.site_id;
    try {
      const auto& tm = timemaps.get(site);
      sa.histogram = archival_histogram(std::span<const timemap>(&tm, 1), month, cfg.utc_offset);
      std::vector<selection> sels;
      for (const auto day : dates_in(cfg)) {
        if (month) {
          const std::chrono::year_month_day ymd{day};
          if (ymd.year() != month->year() || ymd.month() != month->month()) continue;
        }
        const auto target = timestamp{day} + cfg.target_time;
        sels.push_back({select_nearest(tm, target), target});
      }
      if (!sels.empty()) {
        const auto stats = offset_stats(sels);
        sa.offsets_minutes = stats.offsets_minutes;
        sa.summary = five_number_summary(stats.offsets_minutes);
        sa.mean = stats.mean;
      }
    } catch (const error& e) {
      sa.status = reason_of(e);
      sa.detail = e.what();
    }
    rep.sites.push_back(std::move(sa));
  }
  return rep;
}

inline std::string hours_csv(const archival_report& rep) {
  std::string out = "site_id";
  char buf[8];
  for (int h = 0; h < 24; ++h) {
    std::snprintf(buf, sizeof buf, ",h%02d", h);
    out += buf;
  }
  out += ",total";
  out += crlf;
  for (const auto& s : rep.sites) {
    if (s.status != status_ok) continue;
    out += csv_field(s.site_id);
    for (auto c : s.histogram.counts) out += "," + std::to_string(c);
    out += "," + std::to_string(s.histogram.total);
    out += crlf;
  }
  return out;
}

inline std::string offsets_csv(const archival_report& rep) {
  std::string out = "site_id,n,min,q1,median,q3,max,mean";
  out += crlf;
  for (const auto& s : rep.sites) {
    if (s.status != status_ok || !s.summary) continue;
    const auto& f = *s.summary;
    out += csv_field(s.site_id) + "," + std::to_string(s.offsets_minutes.size());
    for (double v : {f.min, f.q1, f.median, f.q3, f.max, s.mean}) out += "," + format_fixed(v, 1);
    out += crlf;
  }
  return out;
}

inline void emit_archival(const archival_report& rep, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_file_atomic(out_dir / "archival_hours.csv", hours_csv(rep));
  write_file_atomic(out_dir / "archival_offsets.csv", offsets_csv(rep));
}

}  // namespace topnews
