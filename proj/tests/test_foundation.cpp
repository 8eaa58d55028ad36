#include <gtest/gtest.h>

#include "support.hpp"
#include "topnews/datetime.hpp"
#include "topnews/uri.hpp"
#include "topnews/utf8.hpp"

using namespace topnews;
using namespace std::chrono;

TEST(Datetime, Timestamp14RoundTrip) {
  const auto t = parse_timestamp14("20161101010000");
  ASSERT_TRUE(t);
  EXPECT_EQ(format_iso8601(*t), "2016-11-01T01:00:00Z");
  EXPECT_EQ(format_timestamp14(*t), "20161101010000");
}

TEST(Datetime, Timestamp14RejectsBadInput) {
  EXPECT_FALSE(parse_timestamp14("2016110101000"));
  EXPECT_FALSE(parse_timestamp14("20161301010000"));
  EXPECT_FALSE(parse_timestamp14("20161131010000"));
  EXPECT_FALSE(parse_timestamp14("2016110101000x"));
  EXPECT_FALSE(parse_timestamp14("20161101250000"));
}

TEST(Datetime, HttpDateRoundTrip) {
  const auto t = parse_http_date("Tue, 01 Nov 2016 01:00:00 GMT");
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, *parse_timestamp14("20161101010000"));
  EXPECT_EQ(format_http_date(*t), "Tue, 01 Nov 2016 01:00:00 GMT");
  EXPECT_FALSE(parse_http_date("Tue, 01 Foo 2016 01:00:00 GMT"));
}

TEST(Datetime, Iso8601Forms) {
  EXPECT_EQ(parse_iso8601("2016-11-01T01:00:00Z"), parse_timestamp14("20161101010000"));
  EXPECT_EQ(parse_iso8601("2016-11-01T01:00:00+00:00"), parse_timestamp14("20161101010000"));
  EXPECT_FALSE(parse_iso8601("2016-11-01 01:00:00"));
  EXPECT_EQ(parse_datetime("Tue, 01 Nov 2016 01:00:00 GMT"), parse_datetime("2016-11-01T01:00:00Z"));
}

TEST(Datetime, DatesAndTimesOfDay) {
  const auto d = parse_date("2016-11-08");
  ASSERT_TRUE(d);
  EXPECT_EQ(format_date(*d), "2016-11-08");
  EXPECT_FALSE(parse_date("2016-02-30"));
  EXPECT_EQ(parse_time_of_day("01:00Z"), seconds{hours{1}});
  EXPECT_EQ(parse_time_of_day("20:30"), seconds{hours{20} + minutes{30}});
  EXPECT_FALSE(parse_time_of_day("24:00Z"));
  EXPECT_EQ(format_time_of_day(hours{1}), "01:00Z");
  EXPECT_EQ(date_of(*parse_iso8601("2016-11-08T23:59:59Z")), *d);
}

TEST(Datetime, UtcOffsets) {
  EXPECT_EQ(parse_utc_offset("-5"), minutes{-300});
  EXPECT_EQ(parse_utc_offset("+5:30"), minutes{330});
  EXPECT_EQ(parse_utc_offset("-05:00"), minutes{-300});
  EXPECT_EQ(parse_utc_offset("0"), minutes{0});
  EXPECT_FALSE(parse_utc_offset("-15"));
  EXPECT_FALSE(parse_utc_offset("abc"));
  EXPECT_EQ(format_utc_offset(minutes{-300}), "-05:00");
}

TEST(Uri, SplitAndRecompose) {
  const std::string u = "https://user@Host.example:8443/a/b?q=1#frag";
  const auto c = uri::split(u);
  EXPECT_EQ(*c.scheme, "https");
  EXPECT_EQ(*c.authority, "user@Host.example:8443");
  EXPECT_EQ(c.path, "/a/b");
  EXPECT_EQ(*c.query, "q=1");
  EXPECT_EQ(*c.fragment, "frag");
  EXPECT_EQ(uri::recompose(c), u);
  EXPECT_EQ(uri::host_of(u), "host.example");
}

// RFC 3986 section 5.4 reference resolution examples.
TEST(Uri, ResolveRfcExamples) {
  const std::string base = "http://a/b/c/d;p?q";
  const std::pair<const char*, const char*> cases[] = {
      {"g:h", "g:h"},           {"g", "http://a/b/c/g"},     {"./g", "http://a/b/c/g"},
      {"g/", "http://a/b/c/g/"}, {"/g", "http://a/g"},        {"//g", "http://g"},
      {"?y", "http://a/b/c/d;p?y"}, {"g?y", "http://a/b/c/g?y"}, {"#s", "http://a/b/c/d;p?q#s"},
      {"", "http://a/b/c/d;p?q"}, {".", "http://a/b/c/"},     {"..", "http://a/b/"},
      {"../g", "http://a/b/g"},  {"../../g", "http://a/g"},  {"../../../g", "http://a/g"},
      {"/./g", "http://a/g"},    {"g.", "http://a/b/c/g."},  {"g;x=1/../y", "http://a/b/c/y"},
  };
  for (const auto& [ref, expected] : cases) EXPECT_EQ(uri::resolve(base, ref), expected) << ref;
}

TEST(Uri, AbsoluteAndHttp) {
  EXPECT_TRUE(uri::is_absolute("http://news.example/a"));
  EXPECT_FALSE(uri::is_absolute("/politics/story.html"));
  EXPECT_FALSE(uri::is_absolute("mailto:x@y"));
  EXPECT_TRUE(uri::is_http("HTTPS://x.example/"));
  EXPECT_FALSE(uri::is_http("javascript:void(0)"));
}

TEST(Uri, DedupKeyIgnoresSchemeSlashAndFragment) {
  const auto k = uri::dedup_key("http://News.example/a/");
  EXPECT_EQ(k, uri::dedup_key("https://news.example/a"));
  EXPECT_EQ(k, uri::dedup_key("https://news.example:443/a#comments"));
  EXPECT_EQ(k, uri::dedup_key("http://news.example:80/a//"));
  EXPECT_NE(k, uri::dedup_key("http://news.example/a?page=2"));
  EXPECT_NE(k, uri::dedup_key("http://news.example/b"));
}

TEST(Utf8, LossyDecoding) {
  EXPECT_EQ(utf8::sanitize("caf\xc3\xa9"), "caf\xc3\xa9");
  EXPECT_EQ(utf8::sanitize("a\xff" "b"), "a\xef\xbf\xbd" "b");
  EXPECT_EQ(utf8::sanitize("\xe2\x82"), "\xef\xbf\xbd");
  EXPECT_EQ(utf8::sanitize("\xe2\x82x"), "\xef\xbf\xbdx");
  EXPECT_EQ(utf8::sanitize("\xc0\xaf"), "\xef\xbf\xbd\xef\xbf\xbd");        // overlong
  EXPECT_EQ(utf8::sanitize("\xed\xa0\x80"), "\xef\xbf\xbd\xef\xbf\xbd\xef\xbf\xbd");  // surrogate
  EXPECT_EQ(utf8::sanitize("\xf4\x90\x80\x80").size(), 12u);  // above U+10FFFF
  EXPECT_EQ(utf8::length("caf\xc3\xa9"), 4u);
}

TEST(Utf8, AppendEncodesAllPlanes) {
  for (char32_t cp : {U'a', U'é', U'€', U'\U0001F600'}) {
    std::string s;
    utf8::append(s, cp);
    std::size_t pos = 0;
    EXPECT_EQ(utf8::decode_next(s, pos), cp);
    EXPECT_EQ(pos, s.size());
  }
}
