#pragma once

// Network transport backed by cpp-httplib. Kept out of the umbrella header
// so that offline users do not pull in the HTTP stack.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <string>

#include "transport.hpp"
#include "uri.hpp"

namespace topnews {

class http_transport final : public transport {
 public:
  explicit http_transport(std::string user_agent = "topnews/1.0") : user_agent_(std::move(user_agent)) {}

  http_response get(const std::string& target, std::chrono::milliseconds timeout) override {
    const auto c = uri::split(target);
    if (!c.scheme || !c.authority) throw error(errc::invalid_argument, "not an absolute URI: " + target);
    httplib::Client client(uri::to_lower(*c.scheme) + "://" + *c.authority);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_follow_location(false);
    client.enable_server_certificate_verification(true);

    std::string path = c.path.empty() ? "/" : c.path;
    if (c.query) path += "?" + *c.query;
    auto res = client.Get(path, httplib::Headers{{"User-Agent", user_agent_}});
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
        throw error(errc::timeout, "timed out fetching " + target);
      throw error(errc::http_error, "request failed for " + target + ": " + httplib::to_string(err), 0);
    }
    http_response r;
    r.status = res->status;
    r.location = res->get_header_value("Location");
    r.content_type = res->get_header_value("Content-Type");
    r.body = std::move(res->body);
    return r;
  }

 private:
  std::string user_agent_;
};

}  // namespace topnews
