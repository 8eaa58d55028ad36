#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"
#include "uri.hpp"

namespace topnews {

/// A single HTTP exchange, redirects not followed.
struct http_response {
  int status = 0;
  std::string location;
  std::string content_type;
  std::string body;
};

/// Fetches one URI. Implementations throw errc::timeout when the request
/// does not complete in time; every other outcome is an http_response.
class transport {
 public:
  virtual ~transport() = default;
  virtual http_response get(const std::string& uri, std::chrono::milliseconds timeout) = 0;
};

struct fetch_policy {
  int max_redirects = 10;
  std::chrono::milliseconds timeout{30'000};
};

struct fetch_result {
  int status = 0;
  std::string final_uri;
  std::string body;
  std::string content_type;
  std::vector<std::string> redirects;
};

inline bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

/// GET with redirect following. At most `policy.max_redirects` hops are
/// followed; a further redirect raises errc::too_many_redirects. Terminal
/// 4xx/5xx statuses (and redirects without a Location) raise errc::http_error.
inline fetch_result fetch_memento(transport& t, const std::string& uri_m, const fetch_policy& policy) {
  if (!uri::is_absolute(uri_m)) throw error(errc::invalid_argument, "not an absolute URI: " + uri_m);
  fetch_result result;
  std::string current = uri_m;
  for (int hops = 0;; ++hops) {
    http_response r = t.get(current, policy.timeout);
    if (is_redirect(r.status) && !r.location.empty()) {
      if (hops >= policy.max_redirects)
        throw error(errc::too_many_redirects,
                    "more than " + std::to_string(policy.max_redirects) + " redirects from " + uri_m,
                    r.status);
      result.redirects.push_back(current);
      current = uri::resolve(current, r.location);
      continue;
    }
    if (r.status < 200 || r.status >= 300)
      throw error(errc::http_error, "HTTP " + std::to_string(r.status) + " for " + current, r.status);
    result.status = r.status;
    result.final_uri = std::move(current);
    result.body = std::move(r.body);
    result.content_type = std::move(r.content_type);
    return result;
  }
}

/// Politeness wrapper: bounds concurrent requests globally and spaces
/// requests to the same host by at least `min_interval`.
class throttled_transport final : public transport {
 public:
  throttled_transport(transport& inner, std::ptrdiff_t parallelism, std::chrono::milliseconds min_interval)
      : inner_(inner), slots_(parallelism < 1 ? 1 : parallelism), min_interval_(min_interval) {}

  http_response get(const std::string& uri, std::chrono::milliseconds timeout) override {
    slots_.acquire();
    struct release_guard {
      std::counting_semaphore<>& s;
      ~release_guard() { s.release(); }
    } guard{slots_};
    const auto host = uri::host_of(uri);
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(mutex_);
      const auto now = std::chrono::steady_clock::now();
      auto& next = next_slot_[host];
      slot = next > now ? next : now;
      next = slot + min_interval_;
    }
    std::this_thread::sleep_until(slot);
    return inner_.get(uri, timeout);
  }

 private:
  transport& inner_;
  std::counting_semaphore<> slots_;
  std::chrono::milliseconds min_interval_;
  std::mutex mutex_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_slot_;
};

}  // namespace topnews
