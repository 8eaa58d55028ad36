// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails. Tolerances and time limits are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <regex>

#include <nlohmann/json.hpp>

#include "oracle/brute_force.hpp"
#include "support.hpp"
#include "topnews/cache.hpp"
#include "topnews/pipeline.hpp"

#ifndef TOPNEWS_REFERENCE_DOC
#error "TOPNEWS_REFERENCE_DOC must point at the document holding the published reference values"
#endif

using namespace topnews;
using namespace std::chrono;
using test_support::fixtures;
using test_support::mock_transport;
using test_support::slurp;
using test_support::temp_dir;

namespace {

constexpr double kExact = 1e-12;
constexpr double kPipeline = 1e-9;
constexpr auto kBoundaryLimit = 1s;
constexpr auto kOracleLimit = 10s;
constexpr auto kExtractionLimit = 5s;
const std::string kArchive = "https://archive.example";

struct check_failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw check_failed(what);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int failures = 0;

void criterion(const char* name, const std::function<std::string()>& body) {
  std::string detail;
  bool ok = false;
  try {
    detail = body();
    ok = true;
  } catch (const std::exception& e) {
    detail = e.what();
  }
  if (!ok) ++failures;
  std::printf("%s %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
}

template <typename Rep, typename Period>
void within(steady_clock::time_point start, duration<Rep, Period> limit, const char* what) {
  const auto took = duration_cast<milliseconds>(steady_clock::now() - start);
  require(took <= limit, std::string(what) + " took " + std::to_string(took.count()) + " ms");
}

similarity_matrix constant(std::size_t n, double off) {
  similarity_matrix d{dense_matrix(n, n, off)};
  for (std::size_t i = 0; i < n; ++i) d.values(i, i) = 1.0;
  return d;
}

// --- published reference values -------------------------------------------

std::string reference_values() {
  struct row {
    const char* k;
    double min, mean, max;
  };
  constexpr row table[] = {{"1", 0.1268, 0.2858, 0.5037}, {"3", 0.1248, 0.2160, 0.3566}, {"10", 0.1150, 0.1608, 0.2786}};
  constexpr double peak_day[] = {0.504, 0.357, 0.279};
  const auto doc = slurp(TOPNEWS_REFERENCE_DOC);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = table[i];
    char pattern[160];
    std::snprintf(pattern, sizeof pattern, "&\\s*%s\\s*&\\s*%.4f\\s*&\\s*%.4f\\s*&\\s*%.4f", r.k, r.min, r.mean, r.max);
    require(std::regex_search(doc, std::regex(pattern)), std::string("reference row k=") + r.k + " not found");
    require(r.min <= r.mean && r.mean <= r.max, "reference row out of order");
    // The peak day is each k's maximum, rounded to three places.
    require(std::abs(peak_day[i] - r.max) <= 5e-4, "peak day disagrees with maximum");
    char phrase[64];
    std::snprintf(phrase, sizeof phrase, "was %.3f", peak_day[i]);
    require(doc.find(phrase) != std::string::npos, std::string("peak value ") + phrase + " not found");
  }
  return "reference values pinned and matched to source text; not reproduced (needs the 2016-2017 archive state)";
}

// --- similarity boundary conditions ---------------------------------------

std::string boundary() {
  const auto start = steady_clock::now();
  for (std::size_t n = 2; n <= 60; ++n) {
    similarity_matrix id{dense_matrix::identity(n)};
    require(std::abs(score_collection(id).s) <= kExact, "identity n=" + std::to_string(n));
    require(std::abs(score_collection(constant(n, 1.0)).s - 1.0) <= kExact, "all-ones n=" + std::to_string(n));
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = i == 0 ? 0.0 : i == 1 ? 1.0 : u(rng);
    auto d = constant(2, x);
    require(std::abs(score_collection(d).s - x) <= kExact, "n=2 x=" + fmt(x));
  }
  within(start, kBoundaryLimit, "boundary suite");
  return "identity->0, ones->1 (n=2..60), n=2 s=x for 10000 x, tol 1e-12";
}

// --- oracle equivalence ----------------------------------------------------

std::string oracle_equivalence() {
  const auto start = steady_clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  constexpr int matrices = 500;
  for (int m = 0; m < matrices; ++m) {
    const std::size_t n = 2 + rng() % 5;
    similarity_matrix d{dense_matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d.values(i, j) = u(rng);  // not necessarily symmetric
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) sum += d.values(i, j) * d.values(i, j);
    const double direct = std::sqrt(sum / static_cast<double>(n * (n - 1)));
    worst = std::max(worst, std::abs(score_collection(d).s - direct));
  }
  require(worst <= kExact, "random matrix deviation " + fmt(worst));

  const auto dir = fixtures() / "minirun";
  temp_dir scratch;
  auto cfg = load_config(dir / "config.json");
  cfg.out_dir = scratch / "out";
  cfg.clean_dir = scratch / "clean";
  validate(cfg);
  caching_transport store(cfg.cache_dir);
  const auto results = run_range(cfg, store);
  std::size_t compared = 0;
  double pipeline_worst = 0.0;
  for (const auto& o : oracle::brute_force_scores(dir)) {
    bool found = false;
    for (const auto& r : results)
      for (const auto& k : r.per_k)
        if (format_date(r.day) == o.date && k.k == o.k) {
          found = true;
          require(k.n_documents == o.n, o.date + " k=" + std::to_string(o.k) + " document count differs");
          require(k.score.has_value() == o.s.has_value(), o.date + " k=" + std::to_string(o.k) + " presence differs");
          if (o.s) pipeline_worst = std::max(pipeline_worst, std::abs(*k.score - *o.s));
          ++compared;
        }
    require(found, o.date + " k=" + std::to_string(o.k) + " missing from pipeline output");
  }
  require(compared == 9, "expected 9 (day, k) scores, compared " + std::to_string(compared));
  require(pipeline_worst <= kPipeline, "pipeline deviation " + fmt(pipeline_worst));
  within(start, kOracleLimit, "oracle suite");
  return std::to_string(matrices) + " matrices max dev " + fmt(worst) + "; 3 sites x 3 days x 3 k max dev " +
         fmt(pipeline_worst);
}

// --- extraction fixtures ---------------------------------------------------

struct page {
  std::string name;
  std::string html;
  site_config site;
  timestamp capture;
  std::string base;
  nlohmann::json expected;
  std::string rule_set;
};

std::vector<page> extraction_pages() {
  const auto dir = fixtures() / "extraction";
  auto cfg = load_config(dir / "config.json");
  for (auto& s : cfg.sites) validate(s);
  const auto cases = nlohmann::json::parse(slurp(dir / "cases.json"));
  std::vector<page> out;
  for (const auto& c : cases.at("cases")) {
    page p;
    p.name = c.at("name");
    p.html = slurp(dir / c.at("html").get<std::string>());
    for (const auto& s : cfg.sites)
      if (s.site_id == c.at("site_id")) p.site = s;
    p.capture = *parse_timestamp14(c.at("capture").get<std::string>());
    p.base = c.at("base_uri");
    p.expected = c.at("stories");
    p.rule_set = c.at("rule_set");
    out.push_back(std::move(p));
  }
  return out;
}

std::string extraction() {
  const auto start = steady_clock::now();
  const auto pages = extraction_pages();
  require(pages.size() == 5, "expected 5 extraction fixtures");
  std::size_t lists = 0;
  for (const auto& p : pages) {
    require(resolve_rules(p.site, date_of(p.capture)).name == p.rule_set, p.name + ": rule set");
    for (std::size_t k : {1u, 3u, 10u}) {
      const auto got = extract_stories(p.html, p.site, p.capture, p.base, k, kArchive);
      const auto want = std::min<std::size_t>(k, p.expected.size());
      require(got.size() == want, p.name + " k=" + std::to_string(k) + ": " + std::to_string(got.size()) + " stories");
      for (std::size_t i = 0; i < want; ++i) {
        const auto& e = p.expected[i];
        require(got[i].rank == e.at("rank").get<int>() && got[i].title == e.at("title").get<std::string>() &&
                    got[i].uri == e.at("uri").get<std::string>() &&
                    got[i].original_uri == e.at("original_uri").get<std::string>(),
                p.name + " k=" + std::to_string(k) + " rank " + std::to_string(i + 1) + " differs");
      }
      ++lists;
    }
    if (p.name == "hero-fallback") {
      const auto got = extract_stories(p.html, p.site, p.capture, p.base, 10, kArchive);
      require(got.front().title == "First headline takes the lead" && got.front().is_hero, "hero fallback");
    }
  }
  for (const auto& p : pages)
    if (p.site.site_id == "election") {
      require(resolve_rules(p.site, *parse_date("2016-11-08")).name == "election-2016", "override on 2016-11-08");
      require(resolve_rules(p.site, *parse_date("2016-11-12")).name == "default", "default on 2016-11-12");
    }
  within(start, kExtractionLimit, "extraction suite");
  return std::to_string(lists) + " (fixture, k) lists exact; hero fallback; override window";
}

// --- top-k prefix ----------------------------------------------------------

std::string prefix_property() {
  struct day_page {
    std::string html;
    site_config site;
    timestamp capture;
    std::string base;
  };
  std::vector<day_page> pages;
  for (const auto& p : extraction_pages()) pages.push_back({p.html, p.site, p.capture, p.base});
  const auto dir = fixtures() / "minirun";
  auto cfg = load_config(dir / "config.json");
  validate(cfg);
  caching_transport store(cfg.cache_dir);
  const auto key = nlohmann::json::parse(slurp(dir / "key.json"));
  for (const auto& d : key.at("days"))
    for (const auto& s : d.at("sites")) {
      if (s.at("status") != "ok") continue;
      const auto home = fetch_memento(store, s.at("uri_m"), cfg.fetch);
      for (const auto& site : cfg.sites)
        if (site.site_id == s.at("site_id"))
          pages.push_back({home.body, site, *parse_iso8601(s.at("capture").get<std::string>()), home.final_uri});
    }
  for (const auto& p : pages) {
    const auto k1 = extract_stories(p.html, p.site, p.capture, p.base, 1, kArchive);
    const auto k3 = extract_stories(p.html, p.site, p.capture, p.base, 3, kArchive);
    const auto k10 = extract_stories(p.html, p.site, p.capture, p.base, 10, kArchive);
    const auto is_prefix = [](const std::vector<story>& a, const std::vector<story>& b) {
      return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
    };
    require(is_prefix(k1, k3) && is_prefix(k3, k10), p.site.site_id + " at " + format_iso8601(p.capture));
  }
  return std::to_string(pages.size()) + " site-days: k=1 prefix of k=3 prefix of k=10";
}

// --- TimeMap suite ---------------------------------------------------------

std::string timemap_suite() {
  const std::pair<const char*, const char*> maps[] = {{"alpha", "http://alpha.example/"},
                                                       {"beta", "https://www.beta.example/"},
                                                       {"gamma", "http://gamma.example/"},
                                                       {"uniform", "http://uniform.example/"}};
  std::size_t targets = 0;
  for (const auto& [name, original] : maps) {
    const auto tm = parse_timemap(slurp(fixtures() / "timemaps" / (std::string(name) + ".link")), original);
    const auto text = serialize_timemap(tm);
    const auto again = parse_timemap(text, original);
    require(again.mementos == tm.mementos && serialize_timemap(again) == text, std::string(name) + ": round trip");
    const auto first = tm.mementos.front().capture_datetime - hours{36};
    const auto last = tm.mementos.back().capture_datetime + hours{36};
    for (auto t = first; t <= last; t += minutes{7}) {
      const auto got = select_nearest(tm, t);
      const auto dist = [&](const memento_record& m) { return abs(m.capture_datetime - t); };
      for (const auto& m : tm.mementos) {
        require(dist(got) <= dist(m), std::string(name) + ": not nearest at " + format_iso8601(t));
        if (dist(m) == dist(got))
          require(got.capture_datetime <= m.capture_datetime, std::string(name) + ": tie not earlier");
      }
      ++targets;
    }
  }
  const auto at = [](const char* s) { return *parse_timestamp14(s); };
  const timemap tie{"http://x.example/",
                    {{"https://archive.example/web/20161101005000/http://x.example/", "http://x.example/", at("20161101005000")},
                     {"https://archive.example/web/20161101011000/http://x.example/", "http://x.example/", at("20161101011000")}}};
  require(select_nearest(tie, at("20161101010000")).capture_datetime == at("20161101005000"), "tie case");
  return "4 fixture round trips; " + std::to_string(targets) + " targets exhaustively minimal; tie -> earlier";
}

// --- error policy ----------------------------------------------------------

std::string error_policy() {
  const std::string home = kArchive + "/web/20161110010000/http://a.example/";
  const auto story_uri = [](int i) {
    return kArchive + "/web/20161110010000/http://a.example/s" + std::to_string(i);
  };
  const auto article = [](int i) {
    // Sliding window over a word pool, so neighbouring stories overlap.
    std::string words;
    for (int w = 0; w < 14; ++w) words += "term" + std::to_string((i * 4 + w) % 30) + " ";
    return "<html><head><title>Story " + std::to_string(i) + "</title></head><body><p>" + words + "</p></body></html>";
  };
  mock_transport t;
  temp_dir scratch;
  run_config cfg;
  cfg.cache_dir = scratch / "cache";
  cfg.out_dir = scratch / "out";
  cfg.archive_base = kArchive;
  cfg.from = cfg.to = *parse_date("2016-11-10");
  cfg.k_values = {10};
  site_config site{"a", "http://a.example/", {}, {}};
  rule_set rs;
  rs.name = "default";
  rs.headline_selectors = {"li a"};
  site.rule_sets.push_back(rs);
  cfg.sites.push_back(site);
  validate(cfg);
  t.ok(timemap_uri(cfg, site), "<http://a.example/>; rel=\"original\",\n<" + home +
                                   ">; rel=\"memento\"; datetime=\"Thu, 10 Nov 2016 01:00:00 GMT\"");
  std::string page = "<ul>";
  for (int i = 1; i <= 6; ++i) page += "<li><a href=\"/s" + std::to_string(i) + "\">Story " + std::to_string(i) + "</a>";
  t.ok(home, page + "</ul>");
  for (int i : {1, 3, 6}) t.ok(story_uri(i), article(i));
  t.route(story_uri(2), 404);
  // Twelve URIs redirecting in a cycle.
  const auto hop = [](int h) { return kArchive + "/web/20161110010000/http://a.example/loop/" + std::to_string(h); };
  t.redirect(story_uri(4), hop(0));
  for (int h = 0; h < 12; ++h) t.redirect(hop(h), hop((h + 1) % 12));
  t.ok(story_uri(5), "<html><body><nav><a href=/x>home</a></nav><script>x()</script></body></html>");

  const auto r = run_day(cfg, cfg.from, t);
  const auto& k = r.per_k.at(0);
  require(k.n_attempted == 6 && k.n_documents == 3 && k.excluded.size() == 3,
          "counts attempted/documents/excluded = " + std::to_string(k.n_attempted) + "/" +
              std::to_string(k.n_documents) + "/" + std::to_string(k.excluded.size()));
  const std::pair<int, const char*> want[] = {{2, "http-error"}, {4, "redirect-loop"}, {5, "empty-document"}};
  for (std::size_t i = 0; i < 3; ++i)
    require(k.excluded[i].rank == want[i].first && k.excluded[i].reason == want[i].second &&
                k.excluded[i].uri == story_uri(want[i].first),
            "excluded entry " + std::to_string(i));
  require(k.excluded[0].http_status == 404, "404 status recorded");
  require(t.calls(story_uri(2)) == 1, "404 retried");
  int loop_requests = t.calls(story_uri(4));
  for (int h = 0; h < 12; ++h) loop_requests += t.calls(hop(h));
  require(loop_requests == 11, "redirect loop used " + std::to_string(loop_requests) + " requests");
  std::vector<std::string> remaining;
  for (const auto& so : r.sites.at(0).stories)
    if (so.status == status_ok) remaining.push_back(so.text);
  require(remaining.size() == 3 && k.score, "no score over remaining documents");
  const double expected = oracle::score(remaining);
  require(std::abs(*k.score - expected) <= kPipeline, "score " + fmt(*k.score) + " vs " + fmt(expected));
  return "404, 12-hop loop (11 requests), empty document excluded; 3 of 6 scored, s=" + fmt(*k.score);
}

// --- determinism -----------------------------------------------------------

std::string determinism() {
  const auto dir = fixtures() / "minirun";
  temp_dir scratch;
  std::vector<std::map<std::string, std::string>> runs;
  for (int run = 0; run < 2; ++run) {
    auto cfg = load_config(dir / "config.json");
    cfg.out_dir = scratch / ("out" + std::to_string(run));
    cfg.clean_dir = scratch / ("clean" + std::to_string(run));
    validate(cfg);
    caching_transport store(cfg.cache_dir);
    run_range(cfg, store, stage::extract);
    run_range(cfg, store, stage::score);
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(cfg.out_dir))
      if (e.is_regular_file()) files[std::filesystem::relative(e.path(), cfg.out_dir).string()] = slurp(e.path());
    runs.push_back(std::move(files));
  }
  require(runs[0].size() >= 5, "expected at least 5 output files");
  for (const auto& name : {"series.csv", "summary.csv", "manifest.json", "stories.csv", "stories.json"})
    require(runs[0].contains(name), std::string(name) + " missing");
  require(runs[0] == runs[1], "outputs differ between runs");
  return std::to_string(runs[0].size()) + " CSV/JSON files byte-identical across two offline runs";
}

// --- archival report -------------------------------------------------------

std::string archival() {
  const std::pair<const char*, const char*> maps[] = {
      {"alpha", "http://alpha.example/"}, {"beta", "https://www.beta.example/"}, {"gamma", "http://gamma.example/"}};
  std::vector<timemap> tms;
  for (const auto& [name, original] : maps) {
    tms.push_back(parse_timemap(slurp(fixtures() / "timemaps" / (std::string(name) + ".link")), original));
    const auto utc = archival_histogram(std::span(&tms.back(), 1), std::nullopt, minutes{0});
    require(utc.argmax() == 1, std::string(name) + ": densest UTC hour is not 01");
    const auto local = archival_histogram(std::span(&tms.back(), 1), std::nullopt, hours{-5});
    require(local.argmax() == 20, std::string(name) + ": local argmax " + std::to_string(local.argmax()));
  }
  const auto all = archival_histogram(tms, 2016y / November, hours{-5});
  require(all.argmax() == 20, "combined argmax " + std::to_string(all.argmax()));
  return "densest 01:00Z -> hour 20 at UTC-5 (3 sites, combined " + std::to_string(all.counts[20]) + "/" +
         std::to_string(all.total) + ")";
}

}  // namespace

int main() {
  criterion("reference-values", reference_values);
  criterion("similarity-boundaries", boundary);
  criterion("oracle-equivalence", oracle_equivalence);
  criterion("extraction-fixtures", extraction);
  criterion("top-k-prefix", prefix_property);
  criterion("timemap-suite", timemap_suite);
  criterion("error-policy", error_policy);
  criterion("determinism", determinism);
  criterion("archival-report", archival);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
