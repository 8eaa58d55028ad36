#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "datetime.hpp"
#include "error.hpp"
#include "transport.hpp"

namespace topnews {

/// Lowercase hex SHA-256 of `data`.
inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw error(errc::io_error, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a temporary sibling and rename, so readers never observe a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& p, std::string_view data) {
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  auto tmp = p;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error(errc::output_unwritable, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw error(errc::output_unwritable, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw error(errc::output_unwritable, "cannot rename into " + p.string());
  }
}

/// Content-addressed response cache.
///
/// Layout: one file per URI named by the SHA-256 hex of the URI, holding
/// the raw response body, plus `manifest.jsonl` with one JSON object per
/// stored response (hash, uri, status, location, content_type,
/// retrieved_at). Later manifest lines win. Redirect and error responses
/// are cached too, so a replay follows the same chain.
///
/// With no upstream the cache is an offline store: a miss raises
/// errc::not_cached.
class caching_transport final : public transport {
 public:
  struct entry {
    std::string uri;
    int status = 0;
    std::string location;
    std::string content_type;
    std::string retrieved_at;
  };

  explicit caching_transport(std::filesystem::path dir, transport* upstream = nullptr,
                             bool refresh = false)
      : dir_(std::move(dir)), upstream_(upstream), refresh_(refresh) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (upstream_ && !std::filesystem::is_directory(dir_))
      throw error(errc::output_unwritable, "cannot create cache directory " + dir_.string());
    load_manifest();
  }

  http_response get(const std::string& uri, std::chrono::milliseconds timeout) override {
    const auto key = sha256_hex(uri);
    if (!refresh_ || !upstream_) {
      if (auto hit = lookup(key)) {
        ++hits_;
        return *std::move(hit);
      }
    }
    if (!upstream_) throw error(errc::not_cached, "not in offline store: " + uri);
    ++misses_;
    http_response r = upstream_->get(uri, timeout);
    store(key, uri, r);
    return r;
  }

  std::optional<entry> find(const std::string& uri) const {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(sha256_hex(uri));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::optional<http_response> lookup(const std::string& key) const {
    entry e;
    {
      std::lock_guard lock(mutex_);
      const auto it = entries_.find(key);
      if (it == entries_.end()) return std::nullopt;
      e = it->second;
    }
    const auto body_path = dir_ / key;
    if (!std::filesystem::exists(body_path)) return std::nullopt;
    return http_response{e.status, e.location, e.content_type, read_file(body_path)};
  }

  void store(const std::string& key, const std::string& uri, const http_response& r) {
    write_file_atomic(dir_ / key, r.body);
    entry e{uri, r.status, r.location, r.content_type,
            format_iso8601(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()))};
    const nlohmann::json line = {{"hash", key},           {"uri", e.uri},
                                 {"status", e.status},     {"location", e.location},
                                 {"content_type", e.content_type}, {"retrieved_at", e.retrieved_at}};
    std::lock_guard lock(mutex_);
    std::ofstream out(dir_ / "manifest.jsonl", std::ios::app | std::ios::binary);
    if (!out) throw error(errc::output_unwritable, "cannot append to cache manifest in " + dir_.string());
    out << line.dump() << '\n';
    out.flush();
    entries_[key] = std::move(e);
  }

  void load_manifest() {
    const auto path = dir_ / "manifest.jsonl";
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      // A torn trailing line from an interrupted run is skipped.
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("hash")) continue;
      entries_[j.at("hash").get<std::string>()] =
          entry{j.value("uri", ""), j.value("status", 0), j.value("location", ""),
                j.value("content_type", ""), j.value("retrieved_at", "")};
    }
  }

  std::filesystem::path dir_;
  transport* upstream_;
  bool refresh_;
  mutable std::mutex mutex_;
  std::map<std::string, entry> entries_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace topnews
