#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "html.hpp"
#include "utf8.hpp"

namespace topnews::css {

// Supported grammar (a Selectors Level 3 subset plus :not with lists):
//   type and universal selectors, #id, .class,
//   [attr], [attr=v], [attr~=v], [attr|=v], [attr^=v], [attr$=v], [attr*=v]
//     with an optional "i" case-insensitivity flag,
//   :first-child :last-child :only-child :nth-child() :nth-last-child()
//   :first-of-type :last-of-type :only-of-type :nth-of-type()
//   :nth-last-of-type() :empty :root :not(),
//   combinators: descendant, ">", "+", "~", and selector lists with ",".

struct attribute_test {
  enum class op { exists, equals, includes, dash, prefix, suffix, substring };
  std::string name;
  op kind = op::exists;
  std::string value;
  bool case_insensitive = false;
};

/// an+b with 1-based positions.
struct nth_expr {
  long a = 0;
  long b = 1;

  bool matches(long position) const {
    if (a == 0) return position == b;
    const long diff = position - b;
    return diff % a == 0 && diff / a >= 0;
  }
};

struct complex_selector;

struct pseudo_class {
  enum class kind {
    first_child, last_child, only_child, nth_child, nth_last_child,
    first_of_type, last_of_type, only_of_type, nth_of_type, nth_last_of_type,
    empty, root, negation
  };
  kind type = kind::first_child;
  nth_expr nth;
  std::vector<complex_selector> negated;
};

struct compound_selector {
  std::string tag;  // empty matches any element
  std::vector<std::string> ids;
  std::vector<std::string> classes;
  std::vector<attribute_test> attributes;
  std::vector<pseudo_class> pseudos;
};

struct complex_selector {
  std::vector<compound_selector> parts;
  std::vector<char> combinators;  // combinators[i] joins parts[i] and parts[i + 1]
};

namespace detail {

class parser {
 public:
  explicit parser(std::string_view text) : s_(text) {}

  std::vector<complex_selector> parse_list(bool nested) {
    std::vector<complex_selector> out;
    while (true) {
      skip_ws();
      out.push_back(parse_complex());
      skip_ws();
      if (at_end()) break;
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (nested && peek() == ')') break;
      fail("unexpected character");
    }
    return out;
  }

  bool at_end() const { return pos_ >= s_.size(); }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw error(errc::invalid_selector,
                "invalid selector \"" + std::string(s_) + "\" at " + std::to_string(pos_) + ": " + why);
  }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  static bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

  bool skip_ws() {
    const auto start = pos_;
    while (!at_end() && is_ws(peek())) ++pos_;
    return pos_ != start;
  }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
  }
  static bool ident_char(char c) {
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-';
  }

  bool at_ident() const {
    const char c = peek();
    if (ident_start(c) || c == '\\') return true;
    if (c == '-') {
      const char d = peek(1);
      return ident_start(d) || d == '-' || d == '\\';
    }
    return false;
  }

  void parse_escape(std::string& out) {
    ++pos_;  // backslash
    if (at_end()) fail("dangling escape");
    std::size_t n = 0;
    char32_t cp = 0;
    while (n < 6 && std::isxdigit(static_cast<unsigned char>(peek()))) {
      const char c = peek();
      cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : (std::tolower(c) - 'a' + 10));
      ++pos_;
      ++n;
    }
    if (n > 0) {
      if (!at_end() && is_ws(peek())) ++pos_;
      utf8::append(out, cp == 0 ? utf8::replacement_char : cp);
    } else {
      out.push_back(peek());
      ++pos_;
    }
  }

  std::string parse_ident() {
    if (!at_ident()) fail("expected identifier");
    std::string out;
    while (!at_end()) {
      const char c = peek();
      if (c == '\\') {
        parse_escape(out);
      } else if (ident_char(c)) {
        out.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    return out;
  }

  std::string parse_string() {
    const char quote = peek();
    ++pos_;
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      const char c = peek();
      if (c == quote) {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        parse_escape(out);
      } else {
        out.push_back(c);
        ++pos_;
      }
    }
  }

  complex_selector parse_complex() {
    complex_selector sel;
    sel.parts.push_back(parse_compound());
    while (true) {
      const bool ws = skip_ws();
      const char c = peek();
      if (c == '>' || c == '+' || c == '~') {
        ++pos_;
        skip_ws();
        sel.combinators.push_back(c);
        sel.parts.push_back(parse_compound());
      } else if (ws && !at_end() && c != ',' && c != ')') {
        sel.combinators.push_back(' ');
        sel.parts.push_back(parse_compound());
      } else {
        return sel;
      }
    }
  }

  compound_selector parse_compound() {
    compound_selector c;
    bool any = false;
    if (peek() == '*') {
      ++pos_;
      any = true;
    } else if (at_ident()) {
      c.tag = html::detail::lower(parse_ident());
      any = true;
    }
    while (!at_end()) {
      const char ch = peek();
      if (ch == '#') {
        ++pos_;
        c.ids.push_back(parse_ident());
      } else if (ch == '.') {
        ++pos_;
        c.classes.push_back(parse_ident());
      } else if (ch == '[') {
        c.attributes.push_back(parse_attribute());
      } else if (ch == ':') {
        c.pseudos.push_back(parse_pseudo());
      } else {
        break;
      }
      any = true;
    }
    if (!any) fail("expected a simple selector");
    return c;
  }

  attribute_test parse_attribute() {
    ++pos_;  // '['
    skip_ws();
    attribute_test t;
    t.name = html::detail::lower(parse_ident());
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return t;
    }
    using op = attribute_test::op;
    const char c = peek();
    if (c == '=') {
      t.kind = op::equals;
      ++pos_;
    } else if (peek(1) == '=' && (c == '~' || c == '|' || c == '^' || c == '$' || c == '*')) {
      t.kind = c == '~' ? op::includes : c == '|' ? op::dash : c == '^' ? op::prefix
             : c == '$' ? op::suffix : op::substring;
      pos_ += 2;
    } else {
      fail("expected attribute operator");
    }
    skip_ws();
    if (peek() == '"' || peek() == '\'') {
      t.value = parse_string();
    } else {
      t.value = parse_ident();
    }
    skip_ws();
    if (peek() == 'i' || peek() == 'I' || peek() == 's' || peek() == 'S') {
      t.case_insensitive = peek() == 'i' || peek() == 'I';
      ++pos_;
      skip_ws();
    }
    if (peek() != ']') fail("expected ']'");
    ++pos_;
    return t;
  }

  nth_expr parse_nth() {
    const auto close = s_.find(')', pos_);
    if (close == std::string_view::npos) fail("unterminated nth expression");
    std::string expr;
    for (auto i = pos_; i < close; ++i)
      if (!is_ws(s_[i])) expr.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s_[i]))));
    pos_ = close + 1;
    if (expr == "odd") return {2, 1};
    if (expr == "even") return {2, 0};
    const auto parse_int = [&](std::string_view v, long& out) {
      if (v.empty()) return false;
      std::size_t i = 0;
      bool neg = false;
      if (v[0] == '+' || v[0] == '-') {
        neg = v[0] == '-';
        i = 1;
      }
      if (i >= v.size()) return false;
      long value = 0;
      for (; i < v.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(v[i]))) return false;
        value = value * 10 + (v[i] - '0');
      }
      out = neg ? -value : value;
      return true;
    };
    nth_expr e{0, 0};
    const auto n = expr.find('n');
    if (n == std::string::npos) {
      if (!parse_int(expr, e.b)) fail("bad nth expression");
      return e;
    }
    const std::string_view a = std::string_view(expr).substr(0, n);
    if (a.empty() || a == "+") e.a = 1;
    else if (a == "-") e.a = -1;
    else if (!parse_int(a, e.a)) fail("bad nth expression");
    const std::string_view b = std::string_view(expr).substr(n + 1);
    if (!b.empty() && (b[0] != '+' && b[0] != '-')) fail("bad nth expression");
    if (!b.empty() && !parse_int(b, e.b)) fail("bad nth expression");
    return e;
  }

  pseudo_class parse_pseudo() {
    ++pos_;  // ':'
    if (peek() == ':') fail("pseudo-elements are not supported");
    const auto name = html::detail::lower(parse_ident());
    using k = pseudo_class::kind;
    pseudo_class p;
    struct simple { std::string_view name; k kind; };
    static constexpr simple simples[] = {
        {"first-child", k::first_child},     {"last-child", k::last_child},
        {"only-child", k::only_child},       {"first-of-type", k::first_of_type},
        {"last-of-type", k::last_of_type},   {"only-of-type", k::only_of_type},
        {"empty", k::empty},                 {"root", k::root}};
    for (const auto& sp : simples)
      if (name == sp.name) {
        p.type = sp.kind;
        return p;
      }
    if (peek() != '(') fail("unknown pseudo-class :" + name);
    ++pos_;
    skip_ws();
    if (name == "not") {
      p.type = k::negation;
      p.negated = parse_list(true);
      skip_ws();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return p;
    }
    struct functional { std::string_view name; k kind; };
    static constexpr functional fns[] = {{"nth-child", k::nth_child},
                                         {"nth-last-child", k::nth_last_child},
                                         {"nth-of-type", k::nth_of_type},
                                         {"nth-last-of-type", k::nth_last_of_type}};
    for (const auto& f : fns)
      if (name == f.name) {
        p.type = f.kind;
        p.nth = parse_nth();
        return p;
      }
    fail("unknown pseudo-class :" + name + "()");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline const html::node* parent_element(const html::node& n) {
  return n.parent && n.parent->is_element() ? n.parent : nullptr;
}

// 1-based position among element siblings, optionally only those of the
// same tag, counted from the front or the back.
inline long sibling_position(const html::node& n, bool same_type, bool from_end) {
  if (!n.parent) return 1;
  const auto& kids = n.parent->children;
  long pos = 0;
  const auto visit = [&](const html::node& c) {
    if (c.is_element() && (!same_type || c.name == n.name)) ++pos;
    return &c == &n;
  };
  if (from_end) {
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      if (visit(**it)) break;
  } else {
    for (const auto& c : kids)
      if (visit(*c)) break;
  }
  return pos;
}

inline bool contains_word(std::string_view list, std::string_view word, bool ci) {
  if (word.empty()) return false;
  std::size_t i = 0;
  while (i < list.size()) {
    while (i < list.size() && html::detail::is_space(list[i])) ++i;
    const auto start = i;
    while (i < list.size() && !html::detail::is_space(list[i])) ++i;
    const auto tok = list.substr(start, i - start);
    if (ci ? html::detail::lower(tok) == html::detail::lower(word) : tok == word) return true;
  }
  return false;
}

}  // namespace detail

inline bool matches(const complex_selector& sel, const html::node& n);

namespace detail {

inline bool match_attribute(const attribute_test& t, const html::node& n) {
  const std::string* v = n.attr(t.name);
  if (!v) return false;
  using op = attribute_test::op;
  if (t.kind == op::exists) return true;
  const std::string value = t.case_insensitive ? html::detail::lower(*v) : *v;
  const std::string want = t.case_insensitive ? html::detail::lower(t.value) : t.value;
  switch (t.kind) {
    case op::exists: return true;
    case op::equals: return value == want;
    case op::includes: return contains_word(value, want, false);
    case op::dash: return value == want || value.rfind(want + "-", 0) == 0;
    case op::prefix: return !want.empty() && value.rfind(want, 0) == 0;
    case op::suffix:
      return !want.empty() && value.size() >= want.size() &&
             value.compare(value.size() - want.size(), want.size(), want) == 0;
    case op::substring: return !want.empty() && value.find(want) != std::string::npos;
  }
  return false;
}

inline bool match_pseudo(const pseudo_class& p, const html::node& n) {
  using k = pseudo_class::kind;
  switch (p.type) {
    case k::first_child: return sibling_position(n, false, false) == 1;
    case k::last_child: return sibling_position(n, false, true) == 1;
    case k::only_child: return sibling_position(n, false, false) == 1 && sibling_position(n, false, true) == 1;
    case k::nth_child: return p.nth.matches(sibling_position(n, false, false));
    case k::nth_last_child: return p.nth.matches(sibling_position(n, false, true));
    case k::first_of_type: return sibling_position(n, true, false) == 1;
    case k::last_of_type: return sibling_position(n, true, true) == 1;
    case k::only_of_type: return sibling_position(n, true, false) == 1 && sibling_position(n, true, true) == 1;
    case k::nth_of_type: return p.nth.matches(sibling_position(n, true, false));
    case k::nth_last_of_type: return p.nth.matches(sibling_position(n, true, true));
    case k::empty:
      return std::none_of(n.children.begin(), n.children.end(), [](const auto& c) {
        return c->is_element() || (c->kind == html::node_kind::text && !c->text.empty());
      });
    case k::root: return n.parent && n.parent->kind == html::node_kind::document;
    case k::negation:
      return std::none_of(p.negated.begin(), p.negated.end(),
                          [&](const complex_selector& s) { return css::matches(s, n); });
  }
  return false;
}

inline bool match_compound(const compound_selector& c, const html::node& n) {
  if (!n.is_element()) return false;
  if (!c.tag.empty() && c.tag != n.name) return false;
  for (const auto& id : c.ids) {
    const auto* v = n.attr("id");
    if (!v || *v != id) return false;
  }
  for (const auto& cls : c.classes)
    if (!n.has_class(cls)) return false;
  for (const auto& a : c.attributes)
    if (!match_attribute(a, n)) return false;
  for (const auto& p : c.pseudos)
    if (!match_pseudo(p, n)) return false;
  return true;
}

inline const html::node* previous_element(const html::node& n) {
  if (!n.parent) return nullptr;
  const html::node* prev = nullptr;
  for (const auto& c : n.parent->children) {
    if (c.get() == &n) return prev;
    if (c->is_element()) prev = c.get();
  }
  return nullptr;
}

inline bool match_from(const complex_selector& sel, std::size_t idx, const html::node& n) {
  if (!match_compound(sel.parts[idx], n)) return false;
  if (idx == 0) return true;
  switch (sel.combinators[idx - 1]) {
    case '>': {
      const auto* p = parent_element(n);
      return p && match_from(sel, idx - 1, *p);
    }
    case '+': {
      const auto* p = previous_element(n);
      return p && match_from(sel, idx - 1, *p);
    }
    case '~':
      for (const auto* p = previous_element(n); p; p = previous_element(*p))
        if (match_from(sel, idx - 1, *p)) return true;
      return false;
    default:
      for (const auto* p = parent_element(n); p; p = parent_element(*p))
        if (match_from(sel, idx - 1, *p)) return true;
      return false;
  }
}

}  // namespace detail

inline bool matches(const complex_selector& sel, const html::node& n) {
  return detail::match_from(sel, sel.parts.size() - 1, n);
}

/// A parsed selector list. Construction throws errc::invalid_selector.
class selector {
 public:
  explicit selector(std::string_view text) : text_(text) {
    detail::parser p(text);
    alternatives_ = p.parse_list(false);
  }

  bool matches(const html::node& n) const {
    return std::any_of(alternatives_.begin(), alternatives_.end(),
                       [&](const complex_selector& s) { return css::matches(s, n); });
  }

  /// Matching elements below `root` in document order.
  std::vector<const html::node*> select(const html::node& root) const {
    std::vector<const html::node*> out;
    html::for_each_node(root, [&](const html::node& n) {
      if (n.is_element() && matches(n)) out.push_back(&n);
    });
    return out;
  }

  const html::node* select_first(const html::node& root) const {
    const html::node* found = nullptr;
    html::for_each_node(root, [&](const html::node& n) {
      if (!found && n.is_element() && matches(n)) found = &n;
    });
    return found;
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::vector<complex_selector> alternatives_;
};

}  // namespace topnews::css
