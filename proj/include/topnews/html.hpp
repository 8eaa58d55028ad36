#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "utf8.hpp"

namespace topnews::html {

enum class node_kind { document, element, text, comment };

struct node {
  node_kind kind = node_kind::element;
  std::string name;  // lowercase tag name for elements
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // decoded character data for text and comment nodes
  node* parent = nullptr;
  std::vector<std::unique_ptr<node>> children;
  std::size_t order = 0;  // preorder position in the document

  bool is_element() const { return kind == node_kind::element; }
  bool is_element(std::string_view tag) const { return kind == node_kind::element && name == tag; }

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }

  bool has_class(std::string_view cls) const {
    const auto* c = attr("class");
    if (!c) return false;
    std::string_view rest = *c;
    while (!rest.empty()) {
      const auto start = rest.find_first_not_of(" \t\r\n\f");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = rest.find_first_of(" \t\r\n\f");
      if (rest.substr(0, end) == cls) return true;
      if (end == std::string_view::npos) break;
      rest.remove_prefix(end);
    }
    return false;
  }
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
inline bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

template <std::size_t N>
bool in(std::string_view name, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

inline constexpr std::array<std::string_view, 14> void_elements{
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"};

inline constexpr std::array<std::string_view, 6> raw_text_elements{
    "script", "style", "xmp", "iframe", "noembed", "noframes"};

inline constexpr std::array<std::string_view, 2> rcdata_elements{"textarea", "title"};

// Start tags that implicitly close an open <p>.
inline constexpr std::array<std::string_view, 37> closes_p{
    "address", "article", "aside", "blockquote", "center", "details", "dialog", "dir", "div", "dl",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hgroup", "hr", "li", "main", "menu", "nav", "ol", "p", "pre", "section", "summary",
    "table", "ul", "dd", "dt"};

// Elements that may stay inside <head>; anything else ends it.
inline constexpr std::array<std::string_view, 9> head_content{
    "base", "link", "meta", "noscript", "script", "style", "template", "title", "object"};

inline constexpr std::array<std::string_view, 6> headings{"h1", "h2", "h3", "h4", "h5", "h6"};

// Elements an implied close never crosses.
inline constexpr std::array<std::string_view, 9> scope_boundaries{
    "html", "table", "td", "th", "caption", "marquee", "object", "applet", "button"};

struct entity {
  std::string_view name;
  char32_t cp;
};

inline constexpr std::array<entity, 64> named_entities{{
    {"amp", '&'},        {"lt", '<'},          {"gt", '>'},          {"quot", '"'},
    {"apos", '\''},      {"nbsp", 0xA0},       {"copy", 0xA9},       {"reg", 0xAE},
    {"trade", 0x2122},   {"hellip", 0x2026},   {"mdash", 0x2014},    {"ndash", 0x2013},
    {"lsquo", 0x2018},   {"rsquo", 0x2019},    {"sbquo", 0x201A},    {"ldquo", 0x201C},
    {"rdquo", 0x201D},   {"bdquo", 0x201E},    {"laquo", 0xAB},      {"raquo", 0xBB},
    {"lsaquo", 0x2039},  {"rsaquo", 0x203A},   {"middot", 0xB7},     {"bull", 0x2022},
    {"deg", 0xB0},       {"times", 0xD7},      {"divide", 0xF7},     {"plusmn", 0xB1},
    {"para", 0xB6},      {"sect", 0xA7},       {"cent", 0xA2},       {"pound", 0xA3},
    {"yen", 0xA5},       {"euro", 0x20AC},     {"iexcl", 0xA1},      {"iquest", 0xBF},
    {"shy", 0xAD},       {"ensp", 0x2002},     {"emsp", 0x2003},     {"thinsp", 0x2009},
    {"zwnj", 0x200C},    {"zwj", 0x200D},      {"dagger", 0x2020},   {"Dagger", 0x2021},
    {"prime", 0x2032},   {"Prime", 0x2033},    {"frac12", 0xBD},     {"frac14", 0xBC},
    {"frac34", 0xBE},    {"aacute", 0xE1},     {"eacute", 0xE9},     {"iacute", 0xED},
    {"oacute", 0xF3},    {"uacute", 0xFA},     {"ntilde", 0xF1},     {"Ntilde", 0xD1},
    {"auml", 0xE4},      {"ouml", 0xF6},       {"uuml", 0xFC},       {"Eacute", 0xC9},
    {"ccedil", 0xE7},    {"agrave", 0xE0},     {"egrave", 0xE8},     {"szlig", 0xDF},
}};

// Windows-1252 meanings for numeric references in 0x80..0x9F.
inline constexpr std::array<char32_t, 32> cp1252_c1{
    0x20AC, 0x81,   0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0x8D,   0x017D, 0x8F,   0x90,   0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x9D,   0x017E, 0x0178};

// Decodes one character reference at s[pos] == '&'. Returns false when the
// text is not a recognised reference, leaving pos unchanged.
inline bool decode_reference(std::string_view s, std::size_t& pos, std::string& out) {
  std::size_t i = pos + 1;
  if (i < s.size() && s[i] == '#') {
    ++i;
    int base = 10;
    if (i < s.size() && (s[i] == 'x' || s[i] == 'X')) {
      base = 16;
      ++i;
    }
    const auto start = i;
    while (i < s.size() && (base == 16 ? std::isxdigit(static_cast<unsigned char>(s[i]))
                                       : std::isdigit(static_cast<unsigned char>(s[i]))))
      ++i;
    if (i == start) return false;
    unsigned long value = 0;
    const auto [p, ec] = std::from_chars(s.data() + start, s.data() + i, value, base);
    (void)p;
    char32_t cp = (ec != std::errc{} || value > 0x10FFFF || value == 0) ? utf8::replacement_char
                                                                        : static_cast<char32_t>(value);
    if (cp >= 0x80 && cp <= 0x9F) cp = cp1252_c1[cp - 0x80];
    if (i < s.size() && s[i] == ';') ++i;
    utf8::append(out, cp);
    pos = i;
    return true;
  }
  const auto start = i;
  while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i])) && i - start < 32) ++i;
  const auto name = s.substr(start, i - start);
  const bool semicolon = i < s.size() && s[i] == ';';
  for (const auto& e : named_entities) {
    if (e.name != name) continue;
    // Only the legacy core set is recognised without a trailing ';'.
    if (!semicolon && e.name != "amp" && e.name != "lt" && e.name != "gt" && e.name != "quot" &&
        e.name != "nbsp" && e.name != "copy" && e.name != "reg")
      return false;
    utf8::append(out, e.cp);
    pos = semicolon ? i + 1 : i;
    return true;
  }
  return false;
}

inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] == '&' && decode_reference(s, pos, out)) continue;
    out.push_back(s[pos++]);
  }
  return out;
}

inline std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < needle.size() && ok; ++j) ok = lower(hay[i + j]) == needle[j];
    if (ok) return i;
  }
  return std::string_view::npos;
}

}  // namespace detail

/// Lenient HTML parser producing a DOM tree. It implements the parts of
/// the HTML tree-construction rules that matter for static news markup:
/// void and raw-text elements, implied end tags for p/li/dt/dd/option and
/// table rows and cells, entity decoding, and tolerant recovery from stray
/// end tags. Invalid UTF-8 is replaced with U+FFFD.
class document {
 public:
  explicit document(std::string_view input) {
    root_ = std::make_unique<node>();
    root_->kind = node_kind::document;
    const std::string text = utf8::sanitize(input);
    parse(text);
    number(*root_);
  }

  document(const document&) = delete;
  document& operator=(const document&) = delete;
  document(document&&) = default;
  document& operator=(document&&) = default;

  const node& root() const { return *root_; }
  std::size_t size() const { return count_; }

 private:
  void parse(std::string_view s) {
    stack_.clear();
    stack_.push_back(root_.get());
    std::size_t pos = 0;
    std::size_t text_start = 0;
    const auto flush_text = [&](std::size_t end) {
      if (end > text_start) add_text(detail::decode_entities(s.substr(text_start, end - text_start)));
    };
    while (pos < s.size()) {
      if (s[pos] != '<') {
        ++pos;
        continue;
      }
      const auto next = pos + 1 < s.size() ? s[pos + 1] : '\0';
      if (s.compare(pos, 4, "<!--") == 0) {
        flush_text(pos);
        const auto end = s.find("-->", pos + 4);
        add_comment(s.substr(pos + 4, (end == std::string_view::npos ? s.size() : end) - pos - 4));
        pos = end == std::string_view::npos ? s.size() : end + 3;
        text_start = pos;
      } else if (next == '!' || next == '?') {
        flush_text(pos);
        const auto end = s.find('>', pos + 2);
        pos = end == std::string_view::npos ? s.size() : end + 1;
        text_start = pos;
      } else if (next == '/' && pos + 2 < s.size() && detail::is_alpha(s[pos + 2])) {
        flush_text(pos);
        auto i = pos + 2;
        const auto name_start = i;
        while (i < s.size() && !detail::is_space(s[i]) && s[i] != '/' && s[i] != '>') ++i;
        const auto name = detail::lower(s.substr(name_start, i - name_start));
        const auto end = s.find('>', i);
        pos = end == std::string_view::npos ? s.size() : end + 1;
        text_start = pos;
        end_tag(name);
      } else if (detail::is_alpha(next)) {
        flush_text(pos);
        pos = start_tag(s, pos + 1);
        text_start = pos;
        node* current = stack_.back();
        if (current->is_element() &&
            (detail::in(current->name, detail::raw_text_elements) ||
             detail::in(current->name, detail::rcdata_elements))) {
          const auto close = detail::find_ci(s, "</" + current->name, pos);
          const auto end = close == std::string_view::npos ? s.size() : close;
          const auto body = s.substr(pos, end - pos);
          if (!body.empty())
            add_text(detail::in(current->name, detail::rcdata_elements) ? detail::decode_entities(body)
                                                                        : std::string(body));
          stack_.pop_back();
          if (close == std::string_view::npos) {
            pos = s.size();
          } else {
            const auto gt = s.find('>', close);
            pos = gt == std::string_view::npos ? s.size() : gt + 1;
          }
          text_start = pos;
        }
      } else {
        ++pos;
      }
    }
    flush_text(s.size());
  }

  // Parses a start tag whose name begins at `pos`; returns the index after '>'.
  std::size_t start_tag(std::string_view s, std::size_t pos) {
    auto i = pos;
    while (i < s.size() && !detail::is_space(s[i]) && s[i] != '/' && s[i] != '>') ++i;
    auto el = std::make_unique<node>();
    el->kind = node_kind::element;
    el->name = detail::lower(s.substr(pos, i - pos));
    bool self_closing = false;
    while (i < s.size()) {
      while (i < s.size() && detail::is_space(s[i])) ++i;
      if (i >= s.size()) break;
      if (s[i] == '>') {
        ++i;
        break;
      }
      if (s[i] == '/') {
        ++i;
        if (i < s.size() && s[i] == '>') {
          self_closing = true;
          ++i;
          break;
        }
        continue;
      }
      const auto name_start = i;
      ++i;
      while (i < s.size() && !detail::is_space(s[i]) && s[i] != '/' && s[i] != '>' && s[i] != '=') ++i;
      auto attr_name = detail::lower(s.substr(name_start, i - name_start));
      while (i < s.size() && detail::is_space(s[i])) ++i;
      std::string value;
      if (i < s.size() && s[i] == '=') {
        ++i;
        while (i < s.size() && detail::is_space(s[i])) ++i;
        if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
          const char q = s[i++];
          const auto end = s.find(q, i);
          value = detail::decode_entities(s.substr(i, (end == std::string_view::npos ? s.size() : end) - i));
          i = end == std::string_view::npos ? s.size() : end + 1;
        } else {
          const auto vstart = i;
          while (i < s.size() && !detail::is_space(s[i]) && s[i] != '>') ++i;
          value = detail::decode_entities(s.substr(vstart, i - vstart));
        }
      }
      if (!el->attr(attr_name)) el->attributes.emplace_back(std::move(attr_name), std::move(value));
    }
    insert_element(std::move(el), self_closing);
    return i;
  }

  bool open_in_scope(std::string_view tag, std::initializer_list<std::string_view> extra = {}) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      const node* n = *it;
      if (n->kind == node_kind::document) return false;
      if (n->name == tag) return true;
      if (detail::in(n->name, detail::scope_boundaries)) return false;
      for (auto e : extra)
        if (n->name == e) return false;
    }
    return false;
  }

  void close_through(std::string_view tag) {
    while (stack_.size() > 1) {
      const bool match = stack_.back()->name == tag;
      stack_.pop_back();
      if (match) return;
    }
  }

  void insert_element(std::unique_ptr<node> el, bool self_closing) {
    const std::string& name = el->name;
    if ((name == "html" || name == "body" || name == "head") && open_in_scope(name)) return;
    if (stack_.back()->is_element("head") && !detail::in(name, detail::head_content)) stack_.pop_back();
    if (detail::in(name, detail::closes_p) && open_in_scope("p")) close_through("p");
    if (name == "li" && open_in_scope("li", {"ul", "ol"})) close_through("li");
    if (name == "dt" || name == "dd") {
      if (open_in_scope("dd", {"dl"})) close_through("dd");
      if (open_in_scope("dt", {"dl"})) close_through("dt");
    }
    if (name == "option" && stack_.back()->name == "option") stack_.pop_back();
    if (name == "tr") {
      for (auto cell : {"td", "th"})
        if (open_in_scope(cell, {"table"})) close_through(cell);
      if (open_in_scope("tr", {"table"})) close_through("tr");
    }
    if (name == "td" || name == "th") {
      for (auto cell : {"td", "th"})
        if (open_in_scope(cell, {"tr", "table"})) close_through(cell);
    }
    if (detail::in(name, detail::headings) && detail::in(stack_.back()->name, detail::headings))
      stack_.pop_back();
    if (name == "a" && open_in_scope("a")) close_through("a");

    node* parent = stack_.back();
    el->parent = parent;
    node* raw = el.get();
    parent->children.push_back(std::move(el));
    if (!self_closing && !detail::in(raw->name, detail::void_elements)) stack_.push_back(raw);
  }

  void end_tag(const std::string& name) {
    if (name == "head" && stack_.back()->is_element("head")) stack_.pop_back();
    if (name == "html" || name == "body" || name == "head") return;
    if (name == "br") {
      auto br = std::make_unique<node>();
      br->name = "br";
      insert_element(std::move(br), true);
      return;
    }
    for (auto i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name == name) {
        stack_.resize(i);
        return;
      }
    }
  }

  void add_text(std::string text) {
    node* parent = stack_.back();
    if (!parent->children.empty() && parent->children.back()->kind == node_kind::text) {
      parent->children.back()->text += text;
      return;
    }
    auto t = std::make_unique<node>();
    t->kind = node_kind::text;
    t->text = std::move(text);
    t->parent = parent;
    parent->children.push_back(std::move(t));
  }

  void add_comment(std::string_view text) {
    auto c = std::make_unique<node>();
    c->kind = node_kind::comment;
    c->text = std::string(text);
    c->parent = stack_.back();
    stack_.back()->children.push_back(std::move(c));
  }

  void number(node& root) {
    std::vector<node*> todo{&root};
    std::size_t next = 0;
    while (!todo.empty()) {
      node* n = todo.back();
      todo.pop_back();
      n->order = next++;
      for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) todo.push_back(it->get());
    }
    count_ = next;
  }

  std::unique_ptr<node> root_;
  std::vector<node*> stack_;
  std::size_t count_ = 0;
};

/// Calls `fn` on every node below `n` (inclusive) in document order.
template <typename Fn>
void for_each_node(const node& n, Fn&& fn) {
  std::vector<const node*> todo{&n};
  while (!todo.empty()) {
    const node* cur = todo.back();
    todo.pop_back();
    fn(*cur);
    for (auto it = cur->children.rbegin(); it != cur->children.rend(); ++it) todo.push_back(it->get());
  }
}

/// Concatenated descendant character data (comments excluded).
inline std::string text_content(const node& n) {
  std::string out;
  for_each_node(n, [&](const node& c) {
    if (c.kind == node_kind::text) out += c.text;
  });
  return out;
}

inline bool is_whitespace_cp(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 ||
         c == 0x2002 || c == 0x2003 || c == 0x2009 || c == 0x200B || c == 0x3000;
}

/// Runs of whitespace (including no-break space) become one ASCII space;
/// leading and trailing whitespace is removed.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = pos;
    const char32_t cp = utf8::decode_next(s, pos);
    if (is_whitespace_cp(cp)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.append(s.substr(start, pos - start));
  }
  return out;
}

inline const node* find_first(const node& n, std::string_view tag) {
  const node* found = nullptr;
  for_each_node(n, [&](const node& c) {
    if (!found && c.is_element(tag)) found = &c;
  });
  return found;
}

}  // namespace topnews::html
