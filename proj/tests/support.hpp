#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "topnews/error.hpp"
#include "topnews/transport.hpp"

#ifndef TOPNEWS_FIXTURES
#error "TOPNEWS_FIXTURES must point at tests/fixtures"
#endif

namespace test_support {

inline std::filesystem::path fixtures() { return TOPNEWS_FIXTURES; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Unique scratch directory, removed on destruction.
class temp_dir {
 public:
  temp_dir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("topnews-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~temp_dir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  temp_dir(const temp_dir&) = delete;
  temp_dir& operator=(const temp_dir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// In-memory transport: fixed routes, unknown URIs answer 404. Counts
/// every request per URI.
class mock_transport : public topnews::transport {
 public:
  void route(const std::string& uri, int status, std::string body = {}, std::string location = {}) {
    routes_[uri] = topnews::http_response{status, std::move(location), "text/html", std::move(body)};
  }
  void ok(const std::string& uri, std::string body) { route(uri, 200, std::move(body)); }
  void redirect(const std::string& uri, const std::string& to, int status = 302) { route(uri, status, {}, to); }

  topnews::http_response get(const std::string& uri, std::chrono::milliseconds) override {
    std::lock_guard lock(mutex_);
    ++calls_[uri];
    ++total_;
    const auto it = routes_.find(uri);
    if (it == routes_.end()) return topnews::http_response{404, {}, "text/html", "not found"};
    return it->second;
  }

  int calls(const std::string& uri) const {
    std::lock_guard lock(mutex_);
    const auto it = calls_.find(uri);
    return it == calls_.end() ? 0 : it->second;
  }
  int total() const { return total_; }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, topnews::http_response> routes_;
  std::map<std::string, int> calls_;
  std::atomic<int> total_{0};
};

/// Expects `fn` to throw topnews::error with `code`.
template <typename Fn>
bool throws_code(Fn&& fn, topnews::errc code) {
  try {
    fn();
  } catch (const topnews::error& e) {
    return e.code() == code;
  }
  return false;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace test_support
