#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topnews {

enum class errc {
  malformed_timemap,
  empty_timemap,
  http_error,
  too_many_redirects,
  timeout,
  empty_input,
  malformed_archive_uri,
  invalid_selector,
  no_applicable_rules,
  no_stories_extracted,
  empty_document,
  corpus_too_small,
  dimension_mismatch,
  value_out_of_range,
  invalid_config,
  invalid_argument,
  io_error,
  output_unwritable,
  day_failed,
  offset_exceeded,
  not_cached,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::malformed_timemap: return "malformed-timemap";
    case errc::empty_timemap: return "empty-timemap";
    case errc::http_error: return "http-error";
    case errc::too_many_redirects: return "redirect-loop";
    case errc::timeout: return "timeout";
    case errc::empty_input: return "empty-input";
    case errc::malformed_archive_uri: return "malformed-archive-uri";
    case errc::invalid_selector: return "invalid-selector";
    case errc::no_applicable_rules: return "no-applicable-rules";
    case errc::no_stories_extracted: return "no-stories";
    case errc::empty_document: return "empty-document";
    case errc::corpus_too_small: return "corpus-too-small";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::value_out_of_range: return "value-out-of-range";
    case errc::invalid_config: return "invalid-config";
    case errc::invalid_argument: return "invalid-argument";
    case errc::io_error: return "io-error";
    case errc::output_unwritable: return "output-unwritable";
    case errc::day_failed: return "day-failed";
    case errc::offset_exceeded: return "offset-exceeded";
    case errc::not_cached: return "not-cached";
  }
  return "unknown";
}

/// Exception carrying a machine-readable code. `status()` is the last HTTP
/// status seen (errc::http_error, errc::too_many_redirects), 0 otherwise.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what, int status = 0)
      : std::runtime_error(what), code_(code), status_(status) {}

  errc code() const noexcept { return code_; }
  int status() const noexcept { return status_; }

 private:
  errc code_;
  int status_;
};

}  // namespace topnews
