#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace topnews::uri {

/// Generic URI split per RFC 3986 appendix B. Absent components are
/// nullopt; present-but-empty components are empty strings.
struct components {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '+' || c == '-' || c == '.';
  });
}

inline components split(std::string_view s) {
  components c;
  if (const auto colon = s.find(':'); colon != std::string_view::npos) {
    const auto first_delim = s.find_first_of("/?#");
    if (colon < first_delim && valid_scheme(s.substr(0, colon))) {
      c.scheme = std::string(s.substr(0, colon));
      s.remove_prefix(colon + 1);
    }
  }
  if (const auto hash = s.find('#'); hash != std::string_view::npos) {
    c.fragment = std::string(s.substr(hash + 1));
    s = s.substr(0, hash);
  }
  if (const auto q = s.find('?'); q != std::string_view::npos) {
    c.query = std::string(s.substr(q + 1));
    s = s.substr(0, q);
  }
  if (s.substr(0, 2) == "//") {
    s.remove_prefix(2);
    const auto slash = s.find('/');
    c.authority = std::string(s.substr(0, slash));
    s = slash == std::string_view::npos ? std::string_view{} : s.substr(slash);
  }
  c.path = std::string(s);
  return c;
}

inline std::string recompose(const components& c) {
  std::string out;
  if (c.scheme) out += *c.scheme + ":";
  if (c.authority) out += "//" + *c.authority;
  out += c.path;
  if (c.query) out += "?" + *c.query;
  if (c.fragment) out += "#" + *c.fragment;
  return out;
}

inline std::string remove_dot_segments(std::string_view in) {
  std::string input(in);
  std::string output;
  while (!input.empty()) {
    if (input.rfind("../", 0) == 0) {
      input.erase(0, 3);
    } else if (input.rfind("./", 0) == 0) {
      input.erase(0, 2);
    } else if (input.rfind("/./", 0) == 0) {
      input.replace(0, 3, "/");
    } else if (input == "/.") {
      input = "/";
    } else if (input.rfind("/../", 0) == 0 || input == "/..") {
      input = input.size() == 3 ? std::string("/") : input.substr(3);
      const auto last = output.rfind('/');
      output.erase(last == std::string::npos ? 0 : last);
    } else if (input == "." || input == "..") {
      input.clear();
    } else {
      const auto next = input.find('/', input[0] == '/' ? 1 : 0);
      output += input.substr(0, next);
      input.erase(0, next == std::string::npos ? input.size() : next);
    }
  }
  return output;
}

inline bool is_absolute(std::string_view s) {
  const auto c = split(s);
  return c.scheme.has_value() && c.authority.has_value() && !c.authority->empty();
}

/// RFC 3986 section 5.2 reference resolution.
inline std::string resolve(std::string_view base, std::string_view reference) {
  const auto b = split(base);
  const auto r = split(reference);
  components t;
  if (r.scheme) {
    t.scheme = r.scheme;
    t.authority = r.authority;
    t.path = remove_dot_segments(r.path);
    t.query = r.query;
  } else {
    if (r.authority) {
      t.authority = r.authority;
      t.path = remove_dot_segments(r.path);
      t.query = r.query;
    } else {
      if (r.path.empty()) {
        t.path = b.path;
        t.query = r.query ? r.query : b.query;
      } else {
        if (r.path.front() == '/') {
          t.path = remove_dot_segments(r.path);
        } else {
          std::string merged;
          if (b.authority && b.path.empty()) {
            merged = "/" + r.path;
          } else {
            const auto last = b.path.rfind('/');
            merged = (last == std::string::npos ? std::string{} : b.path.substr(0, last + 1)) + r.path;
          }
          t.path = remove_dot_segments(merged);
        }
        t.query = r.query;
      }
      t.authority = b.authority;
    }
    t.scheme = b.scheme;
  }
  t.fragment = r.fragment;
  return recompose(t);
}

inline std::string scheme_of(std::string_view s) {
  const auto c = split(s);
  return c.scheme ? to_lower(*c.scheme) : std::string{};
}

inline bool is_http(std::string_view s) {
  const auto sc = scheme_of(s);
  return sc == "http" || sc == "https";
}

/// Lowercased host without userinfo or port.
inline std::string host_of(std::string_view s) {
  const auto c = split(s);
  if (!c.authority) return {};
  std::string_view a = *c.authority;
  if (const auto at = a.rfind('@'); at != std::string_view::npos) a.remove_prefix(at + 1);
  if (!a.empty() && a.front() == '[') {
    const auto close = a.find(']');
    return to_lower(a.substr(0, close == std::string_view::npos ? a.size() : close + 1));
  }
  return to_lower(a.substr(0, a.find(':')));
}

/// Dedup key: scheme dropped, host lowercased, default port dropped,
/// fragment stripped, trailing slash removed.
inline std::string dedup_key(std::string_view s) {
  const auto c = split(s);
  std::string key;
  if (c.authority) {
    std::string_view a = *c.authority;
    if (const auto at = a.rfind('@'); at != std::string_view::npos) a.remove_prefix(at + 1);
    std::string auth = to_lower(a);
    for (std::string_view port : {":80", ":443"})
      if (auth.size() > port.size() && auth.compare(auth.size() - port.size(), port.size(), port) == 0)
        auth.erase(auth.size() - port.size());
    key += auth;
  }
  std::string path = remove_dot_segments(c.path);
  while (!path.empty() && path.back() == '/') path.pop_back();
  key += path;
  if (c.query && !c.query->empty()) key += "?" + *c.query;
  return key;
}

}  // namespace topnews::uri
