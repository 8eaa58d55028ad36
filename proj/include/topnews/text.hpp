#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <unicode/uchar.h>

#include "datetime.hpp"
#include "error.hpp"
#include "html.hpp"
#include "utf8.hpp"

namespace topnews {

// ---------------------------------------------------------------------------
// Boilerplate removal

struct boilerplate_options {
  std::size_t min_words = 10;
  double max_link_density = 0.33;
};

namespace text_detail {

inline constexpr std::array<std::string_view, 13> dropped_subtrees{
    "script", "style", "nav", "header", "footer", "aside",
    // not content: document head and title (prepended separately), and
    // elements whose children are raw text rather than markup
    "head", "title", "iframe", "noembed", "noframes", "xmp", "template"};

inline constexpr std::array<std::string_view, 40> block_elements{
    "address", "article", "blockquote", "body", "caption", "center", "dd", "details", "dialog",
    "dir", "div", "dl", "dt", "fieldset", "figcaption", "figure", "form", "h1", "h2", "h3", "h4",
    "h5", "h6", "hgroup", "hr", "html", "li", "main", "menu", "ol", "p", "pre", "section",
    "summary", "table", "tbody", "td", "th", "tr", "ul"};

inline std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const bool ws = html::is_whitespace_cp(utf8::decode_next(s, pos));
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

class block_segmenter {
 public:
  explicit block_segmenter(const boilerplate_options& opts) : opts_(opts) {}

  void visit(const html::node& n, bool in_link) {
    if (n.kind == html::node_kind::text) {
      text_ += n.text;
      if (in_link) {
        linked_ += n.text;
        linked_ += ' ';
      }
      return;
    }
    if (n.kind == html::node_kind::comment) return;
    if (n.is_element()) {
      if (html::detail::in(n.name, dropped_subtrees)) return;
      if (n.name == "br") {
        text_ += ' ';
        return;
      }
    }
    const bool block = n.is_element() && html::detail::in(n.name, block_elements);
    if (block) flush();
    const bool link = in_link || n.is_element("a");
    for (const auto& c : n.children) visit(*c, link);
    if (block) flush();
  }

  void flush() {
    const auto total = count_words(text_);
    const auto linked = count_words(linked_);
    if (total >= opts_.min_words &&
        static_cast<double>(linked) / static_cast<double>(total) < opts_.max_link_density)
      kept_.push_back(html::collapse_whitespace(text_));
    text_.clear();
    linked_.clear();
  }

  std::vector<std::string>& kept() { return kept_; }

 private:
  const boilerplate_options& opts_;
  std::string text_;
  std::string linked_;
  std::vector<std::string> kept_;
};

}  // namespace text_detail

/// Main-content text of an HTML page.
///
/// The document is cut into blocks at block-level element boundaries,
/// after dropping script/style/nav/header/footer/aside subtrees. A block
/// is kept when it has at least `min_words` whitespace-separated words and
/// a link density (words inside <a> over all words) below
/// `max_link_density`. The <title> text, when present, comes first. Kept
/// blocks are joined by newlines. Throws errc::empty_document when no
/// block survives.
inline std::string strip_boilerplate(std::string_view html_bytes, const boilerplate_options& opts = {}) {
  const html::document doc(html_bytes);
  text_detail::block_segmenter seg(opts);
  seg.visit(doc.root(), false);
  seg.flush();
  if (seg.kept().empty()) throw error(errc::empty_document, "no content block survived boilerplate removal");
  std::string out;
  if (const auto* title = html::find_first(doc.root(), "title")) {
    out = html::collapse_whitespace(html::text_content(*title));
    if (!out.empty()) out += '\n';
  }
  for (std::size_t i = 0; i < seg.kept().size(); ++i) {
    if (i) out += '\n';
    out += seg.kept()[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tokenization

/// Lowercased maximal runs of Unicode alphanumerics (ICU character
/// properties, simple case mapping); tokens shorter than two code points
/// are dropped. No stemming and no stopwords.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;
  const auto finish = [&] {
    if (current_len >= 2) tokens.push_back(current);
    current.clear();
    current_len = 0;
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::decode_next(text, pos);
    if (u_isalnum(static_cast<UChar32>(cp))) {
      utf8::append(current, static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp))));
      ++current_len;
    } else {
      finish();
    }
  }
  finish();
  return tokens;
}

// ---------------------------------------------------------------------------
// Documents and TF-IDF

struct story_ref {
  std::string site_id;
  int rank = 0;
  date capture_date{};

  friend bool operator==(const story_ref&, const story_ref&) = default;
};

struct clean_document {
  story_ref ref;
  std::string text;
  std::size_t token_count = 0;
};

inline clean_document make_clean_document(story_ref ref, std::string text) {
  const auto n = tokenize(text).size();
  return {std::move(ref), std::move(text), n};
}

/// A day's document collection with its vocabulary (byte-order sorted)
/// and per-term document frequencies.
struct corpus {
  std::vector<clean_document> documents;
  std::vector<std::string> vocabulary;
  std::vector<std::size_t> df;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> term_counts;  // per doc, (term, tf) by term

  std::size_t size() const { return documents.size(); }
};

inline corpus make_corpus(std::vector<clean_document> docs) {
  corpus c;
  std::vector<std::map<std::string, std::size_t>> counts(docs.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto& t : tokenize(docs[d].text)) ++counts[d][std::move(t)];
    for (const auto& [term, _] : counts[d]) ++df[term];
  }
  std::map<std::string, std::size_t> index;
  for (const auto& [term, f] : df) {
    index.emplace(term, c.vocabulary.size());
    c.vocabulary.push_back(term);
    c.df.push_back(f);
  }
  c.term_counts.resize(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (const auto& [term, tf] : counts[d]) c.term_counts[d].emplace_back(index.at(term), tf);
  c.documents = std::move(docs);
  return c;
}

/// Sparse TF-IDF vector over a corpus vocabulary. Zero weights are not
/// stored; entries are sorted by term index.
struct term_vector {
  std::size_t dimension = 0;
  std::vector<std::pair<std::size_t, double>> entries;
  double norm = 0.0;

  double weight(std::size_t term) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), term,
                                     [](const auto& e, std::size_t t) { return e.first < t; });
    return it != entries.end() && it->first == term ? it->second : 0.0;
  }
};

inline double euclidean_norm(const term_vector& v) {
  double sum = 0.0;
  for (const auto& [_, w] : v.entries) sum += w * w;
  return std::sqrt(sum);
}

/// weight(t, d) = tf(t, d) * ln(n / df(t)) with raw counts; terms present
/// in every document weigh zero. Requires at least two documents.
inline std::vector<term_vector> build_tfidf(const corpus& c) {
  const auto n = c.size();
  if (n < 2) throw error(errc::corpus_too_small, "TF-IDF needs at least 2 documents, got " + std::to_string(n));
  std::vector<double> idf(c.vocabulary.size());
  for (std::size_t t = 0; t < idf.size(); ++t)
    idf[t] = std::log(static_cast<double>(n) / static_cast<double>(c.df[t]));
  std::vector<term_vector> out(n);
  for (std::size_t d = 0; d < n; ++d) {
    auto& v = out[d];
    v.dimension = c.vocabulary.size();
    for (const auto& [term, tf] : c.term_counts[d]) {
      const double w = static_cast<double>(tf) * idf[term];
      if (w != 0.0) v.entries.emplace_back(term, w);
    }
    v.norm = euclidean_norm(v);
  }
  return out;
}

}  // namespace topnews
