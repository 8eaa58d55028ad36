// topnews: daily similarity of archived news-homepage top stories.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracle/brute_force.hpp"
#include "topnews/http_transport.hpp"
#include "topnews/topnews.hpp"

namespace {

enum exit_code { ok = 0, config_error = 1, partial_failure = 2, output_error = 3 };

struct common_options {
  std::string config;
  std::string from, to, target_time, utc_offset;
  std::vector<std::size_t> k;
  std::string cache, clean_dir, out;
  bool offline = false;
  bool force = false;
  bool dump_matrices = false;
  std::optional<std::size_t> parallelism;

  void add_to(CLI::App& app) {
    app.add_option("--config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--from", from, "first date, YYYY-MM-DD");
    app.add_option("--to", to, "last date, YYYY-MM-DD (inclusive)");
    app.add_option("--target-time", target_time, "time of day, HH:MMZ (UTC) or HH:MM (at --utc-offset)");
    app.add_option("--utc-offset", utc_offset, "fixed display offset, e.g. -5 or +05:30");
    app.add_option("--k", k, "story counts, e.g. --k 1,3,10")->delimiter(',');
    app.add_option("--cache", cache, "cache directory");
    app.add_option("--clean-dir", clean_dir, "directory for cleaned story text (default <cache>/clean)");
    app.add_option("--out", out, "output directory");
    app.add_flag("--offline", offline, "serve every request from the cache");
    app.add_flag("--force", force, "recompute stored days and refetch cached URIs");
    app.add_flag("--dump-matrices", dump_matrices, "write each similarity matrix as JSON");
    app.add_option("--parallelism", parallelism, "concurrent fetches");
  }

  topnews::run_config load() const {
    using topnews::errc;
    using topnews::error;
    auto cfg = topnews::load_config(config);
    const auto bad = [](const std::string& what) { throw error(errc::invalid_config, what); };
    if (!utc_offset.empty()) {
      const auto off = topnews::parse_utc_offset(utc_offset);
      if (!off) bad("bad --utc-offset " + utc_offset);
      cfg.utc_offset = *off;
    }
    if (!target_time.empty()) {
      const auto t = topnews::parse_target_time(target_time, cfg.utc_offset);
      if (!t) bad("bad --target-time " + target_time);
      cfg.target_time = *t;
    }
    if (!from.empty()) {
      const auto d = topnews::parse_date(from);
      if (!d) bad("bad --from " + from);
      cfg.from = *d;
    }
    if (!to.empty()) {
      const auto d = topnews::parse_date(to);
      if (!d) bad("bad --to " + to);
      cfg.to = *d;
    }
    if (!k.empty()) cfg.k_values = k;
    if (!cache.empty()) cfg.cache_dir = cache;
    if (!clean_dir.empty()) cfg.clean_dir = clean_dir;
    if (!out.empty()) cfg.out_dir = out;
    cfg.offline = cfg.offline || offline;
    cfg.force = force;
    cfg.dump_matrices = dump_matrices;
    if (parallelism) cfg.parallelism = *parallelism;
    topnews::validate(cfg);
    return cfg;
  }
};

// Cache in front of the (throttled) network, or the cache alone offline.
class transport_stack {
 public:
  explicit transport_stack(const topnews::run_config& cfg) {
    if (!cfg.offline) {
      net_ = std::make_unique<topnews::http_transport>();
      throttle_ = std::make_unique<topnews::throttled_transport>(
          *net_, static_cast<std::ptrdiff_t>(cfg.parallelism), cfg.min_host_interval);
    }
    cache_ = std::make_unique<topnews::caching_transport>(cfg.cache_dir, throttle_.get(), cfg.force && !cfg.offline);
  }
  topnews::caching_transport& get() { return *cache_; }

 private:
  std::unique_ptr<topnews::http_transport> net_;
  std::unique_ptr<topnews::throttled_transport> throttle_;
  std::unique_ptr<topnews::caching_transport> cache_;
};

void print_site_failures(const topnews::daily_result& r) {
  for (const auto& sd : r.sites)
    if (!sd.ok())
      std::fprintf(stderr, "%s %s: %s at %s: %s\n", topnews::format_date(r.day).c_str(), sd.site_id.c_str(),
                   sd.status.c_str(), sd.failed_stage.c_str(), sd.detail.c_str());
}

int cmd_range(const common_options& opts, topnews::stage upto) {
  const auto cfg = opts.load();
  transport_stack stack(cfg);
  const auto results = topnews::run_range(cfg, stack.get(), upto);
  int code = ok;
  for (const auto& r : results) {
    print_site_failures(r);
    std::size_t sites_ok = 0, stories = 0, docs = 0;
    for (const auto& sd : r.sites) {
      sites_ok += sd.ok();
      stories += sd.stories.size();
      for (const auto& so : sd.stories) docs += so.status == topnews::status_ok;
    }
    std::printf("%s %s sites=%zu/%zu stories=%zu", topnews::format_date(r.day).c_str(), r.status.c_str(), sites_ok,
                r.sites.size(), stories);
    if (upto >= topnews::stage::fetch) std::printf(" documents=%zu", docs);
    for (const auto& k : r.per_k) {
      if (k.score)
        std::printf(" k%zu=%.6f(n=%zu)", k.k, *k.score, k.n_documents);
      else
        std::printf(" k%zu=null(n=%zu)", k.k, k.n_documents);
    }
    std::printf("\n");
    const bool day_failed = upto == topnews::stage::score ? r.failed() : sites_ok == 0;
    if (day_failed) code = partial_failure;
  }
  std::fprintf(stderr, "cache: %zu hits, %zu fetched\n", stack.get().hits(), stack.get().misses());
  return code;
}

int cmd_report(const common_options& opts, const std::string& month_text) {
  const auto cfg = opts.load();
  std::optional<std::chrono::year_month> month;
  if (!month_text.empty()) {
    const auto d = topnews::parse_date(month_text + "-01");
    if (!d) throw topnews::error(topnews::errc::invalid_config, "bad --month " + month_text);
    const std::chrono::year_month_day ymd{*d};
    month = ymd.year() / ymd.month();
  }
  transport_stack stack(cfg);
  const auto rep = topnews::report_archival(cfg, month, stack.get());
  topnews::emit_archival(rep, cfg.out_dir);
  int code = ok;
  for (const auto& s : rep.sites) {
    if (s.status != topnews::status_ok) {
      std::fprintf(stderr, "%s: %s: %s\n", s.site_id.c_str(), s.status.c_str(), s.detail.c_str());
      code = partial_failure;
      continue;
    }
    std::printf("%s mementos=%zu peak_hour=%zu", s.site_id.c_str(), s.histogram.total, s.histogram.argmax());
    if (s.summary)
      std::printf(" offset_min=%.1f mean=%.1f max=%.1f", s.summary->min, s.mean, s.summary->max);
    std::printf("\n");
  }
  return code;
}

int cmd_oracle(const std::string& fixture, const std::string& against) {
  const auto scores = oracle::brute_force_scores(fixture);
  std::map<std::pair<std::string, std::size_t>, std::optional<double>> produced;
  if (!against.empty()) {
    const auto j = nlohmann::json::parse(topnews::read_file(against));
    for (const auto& day : j.at("days"))
      for (const auto& s : day.at("scores"))
        produced[{day.at("date").get<std::string>(), s.at("k").get<std::size_t>()}] =
            s.at("score").is_null() ? std::nullopt : std::optional<double>(s.at("score").get<double>());
  }
  constexpr double tolerance = 1e-9;
  int code = ok;
  for (const auto& r : scores) {
    std::printf("%s k=%zu n=%zu s=", r.date.c_str(), r.k, r.n);
    if (r.s)
      std::printf("%.12f", *r.s);
    else
      std::printf("null");
    if (!against.empty()) {
      const auto it = produced.find({r.date, r.k});
      const bool match = it != produced.end() && it->second.has_value() == r.s.has_value() &&
                         (!r.s || std::abs(*it->second - *r.s) <= tolerance);
      std::printf(" %s", match ? "match" : "MISMATCH");
      if (!match) code = partial_failure;
    }
    std::printf("\n");
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-by-day similarity of top news stories across archived homepages"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "topnews 1.0.0");

  common_options fetch_opts, extract_opts, score_opts, report_opts;
  auto* fetch = app.add_subcommand("fetch", "populate the cache: TimeMaps, homepages and story documents");
  fetch_opts.add_to(*fetch);
  auto* extract = app.add_subcommand("extract", "extract top stories only (stories.csv, stories.json)");
  extract_opts.add_to(*extract);
  auto* score = app.add_subcommand("score", "full per-day scoring (series.csv, summary.csv, manifest.json)");
  score_opts.add_to(*score);
  auto* report = app.add_subcommand("report", "archival statistics (capture-hour histogram, offsets)");
  report_opts.add_to(*report);
  std::string month;
  report->add_option("--month", month, "restrict to one month, YYYY-MM");
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force recomputation of fixture scores");
  std::string fixture, against;
  oracle_cmd->add_option("--fixture", fixture, "fixture directory containing key.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  oracle_cmd->add_option("--against", against, "compare with a manifest.json from `score`")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  try {
    if (*fetch) return cmd_range(fetch_opts, topnews::stage::fetch);
    if (*extract) return cmd_range(extract_opts, topnews::stage::extract);
    if (*score) return cmd_range(score_opts, topnews::stage::score);
    if (*report) return cmd_report(report_opts, month);
    if (*oracle_cmd) return cmd_oracle(fixture, against);
  } catch (const topnews::error& e) {
    std::fprintf(stderr, "topnews: %s\n", e.what());
    switch (e.code()) {
      case topnews::errc::invalid_config:
      case topnews::errc::invalid_selector:
      case topnews::errc::no_applicable_rules:
        return config_error;
      case topnews::errc::output_unwritable:
      case topnews::errc::io_error:
        return output_error;
      default:
        return partial_failure;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "topnews: %s\n", e.what());
    return output_error;
  }
  return ok;
}
