#include <gtest/gtest.h>

#include "support.hpp"
#include "topnews/html.hpp"
#include "topnews/selector.hpp"

using namespace topnews;
using test_support::throws_code;

namespace {

std::vector<std::string> texts(const html::document& doc, const char* sel) {
  std::vector<std::string> out;
  for (const auto* n : css::selector(sel).select(doc.root())) out.push_back(html::collapse_whitespace(html::text_content(*n)));
  return out;
}

using strings = std::vector<std::string>;

}  // namespace

TEST(Html, EntitiesAndAttributes) {
  const html::document doc(R"(<p class="a  b" data-x='1 &amp; 2' id=main>Fish &amp; chips &lt;3 &#8217; &#x41; &copy; &bogus;</p>)");
  const auto* p = html::find_first(doc.root(), "p");
  ASSERT_TRUE(p);
  EXPECT_TRUE(p->has_class("a"));
  EXPECT_TRUE(p->has_class("b"));
  EXPECT_FALSE(p->has_class("a  b"));
  EXPECT_EQ(*p->attr("data-x"), "1 & 2");
  EXPECT_EQ(*p->attr("id"), "main");
  EXPECT_EQ(html::text_content(*p), "Fish & chips <3 ’ A © &bogus;");
}

TEST(Html, RawTextElementsAreNotParsed) {
  const html::document doc("<script>if (a < b) { document.write('<p>x</p>'); }</script><p>real</p>");
  EXPECT_EQ(texts(doc, "p"), strings{"real"});
  const auto* s = html::find_first(doc.root(), "script");
  ASSERT_TRUE(s);
  EXPECT_EQ(html::text_content(*s), "if (a < b) { document.write('<p>x</p>'); }");
}

TEST(Html, ImpliedEndTags) {
  const html::document doc("<ul><li>one<li>two</ul><p>a<p>b<div>c</div><table><tr><td>1<td>2<tr><td>3</table>");
  EXPECT_EQ(texts(doc, "li"), (strings{"one", "two"}));
  EXPECT_EQ(texts(doc, "p"), (strings{"a", "b"}));
  EXPECT_EQ(texts(doc, "td"), (strings{"1", "2", "3"}));
  EXPECT_EQ(texts(doc, "tr"), (strings{"12", "3"}));
}

TEST(Html, HeadEndsAtFirstBodyContent) {
  const html::document doc("<html><head><title>T</title><meta charset=utf-8><p>body text</p></html>");
  const auto* p = html::find_first(doc.root(), "p");
  ASSERT_TRUE(p);
  EXPECT_FALSE(p->parent->is_element("head"));
  const html::document doc2("<html><head><title>T</title></head><body><p>x</p></body></html>");
  EXPECT_FALSE(html::find_first(doc2.root(), "p")->parent->is_element("head"));
}

TEST(Html, CommentsAndDoctypeAreSkipped) {
  const html::document doc("<!DOCTYPE html><!-- <p>hidden</p> --><p>shown</p><?xml junk?>");
  EXPECT_EQ(texts(doc, "p"), strings{"shown"});
}

TEST(Html, StrayEndTagsAndUnclosedElements) {
  const html::document doc("</span><div><b>bold<i>both</b>after</div><p>end");
  EXPECT_EQ(texts(doc, "div"), strings{"boldbothafter"});
  EXPECT_EQ(texts(doc, "p"), strings{"end"});
}

TEST(Html, NestedAnchorsAreSplit) {
  const html::document doc(R"(<a href="/1">one<a href="/2">two</a>)");
  EXPECT_EQ(texts(doc, "a"), (strings{"one", "two"}));
}

TEST(Html, InvalidUtf8IsReplaced) {
  const html::document doc("<p>caf\xe9</p>");
  EXPECT_EQ(texts(doc, "p"), strings{"caf\xef\xbf\xbd"});
}

TEST(Html, CollapseWhitespace) {
  EXPECT_EQ(html::collapse_whitespace("  a \n\t b\xc2\xa0 c  "), "a b c");
  EXPECT_EQ(html::collapse_whitespace(" \n "), "");
}

class SelectorTest : public ::testing::Test {
 protected:
  html::document doc{R"(<html><body>
    <div id="top" class="module hero">
      <h2 class="title">Hero</h2>
      <a class="hfwmm-primary-hed-link js-link" href="/story/1" data-id="s1" lang="en-US">Lead</a>
    </div>
    <ul class="list">
      <li><a href="/story/2" class="item">Two</a></li>
      <li class="odd"><a href="/story/3" class="item">Three</a></li>
      <li><a href="https://other.example/4" class="item ext">Four</a></li>
      <li><span>no link</span></li>
    </ul>
    <p></p>
    <section><h3>Head</h3><p>one</p><p>two</p><span>s</span><p>three</p></section>
  </body></html>)"};
};

TEST_F(SelectorTest, TypeClassId) {
  EXPECT_EQ(texts(doc, "a.hfwmm-primary-hed-link"), strings{"Lead"});
  EXPECT_EQ(texts(doc, "#top a"), strings{"Lead"});
  EXPECT_EQ(texts(doc, ".module.hero > .title"), strings{"Hero"});
  EXPECT_EQ(texts(doc, "li a.item"), (strings{"Two", "Three", "Four"}));
  EXPECT_EQ(texts(doc, "*.ext"), strings{"Four"});
  EXPECT_EQ(texts(doc, "A.ITEM").size(), 0u);  // class names are case-sensitive
  EXPECT_EQ(texts(doc, "LI > A").size(), 3u);  // type names are not
}

TEST_F(SelectorTest, Attributes) {
  EXPECT_EQ(texts(doc, "a[href^='https://']"), strings{"Four"});
  EXPECT_EQ(texts(doc, "a[href$=\"/3\"]"), strings{"Three"});
  EXPECT_EQ(texts(doc, "a[href*=story]").size(), 3u);
  EXPECT_EQ(texts(doc, "a[class~=js-link]"), strings{"Lead"});
  EXPECT_EQ(texts(doc, "a[lang|=en]"), strings{"Lead"});
  EXPECT_EQ(texts(doc, "a[data-id]"), strings{"Lead"});
  EXPECT_EQ(texts(doc, "a[data-id=S1 i]"), strings{"Lead"});
  EXPECT_EQ(texts(doc, "a[data-id=S1]").size(), 0u);
}

TEST_F(SelectorTest, Combinators) {
  EXPECT_EQ(texts(doc, "h3 + p"), strings{"one"});
  EXPECT_EQ(texts(doc, "h3 ~ p"), (strings{"one", "two", "three"}));
  EXPECT_EQ(texts(doc, "section > p"), (strings{"one", "two", "three"}));
  EXPECT_EQ(texts(doc, "ul a, #top a"), (strings{"Lead", "Two", "Three", "Four"}));  // document order
}

TEST_F(SelectorTest, PseudoClasses) {
  EXPECT_EQ(texts(doc, "li:first-child a"), strings{"Two"});
  EXPECT_EQ(texts(doc, "li:last-child"), strings{"no link"});
  EXPECT_EQ(texts(doc, "li:nth-child(2n+1)"), (strings{"Two", "Four"}));
  EXPECT_EQ(texts(doc, "li:nth-child(odd)"), (strings{"Two", "Four"}));
  EXPECT_EQ(texts(doc, "li:nth-child(even)"), (strings{"Three", "no link"}));
  EXPECT_EQ(texts(doc, "li:nth-last-child(1)"), strings{"no link"});
  EXPECT_EQ(texts(doc, "section p:nth-of-type(2)"), strings{"two"});
  EXPECT_EQ(texts(doc, "section p:last-of-type"), strings{"three"});
  EXPECT_EQ(texts(doc, "section span:only-of-type"), strings{"s"});
  EXPECT_EQ(texts(doc, "li:not(.odd) > a"), (strings{"Two", "Four"}));
  EXPECT_EQ(css::selector("p:empty").select(doc.root()).size(), 1u);
  EXPECT_EQ(css::selector(":root").select(doc.root()).size(), 1u);
}

TEST_F(SelectorTest, SelectFirstAndMatches) {
  const css::selector sel("a.item");
  const auto* first = sel.select_first(doc.root());
  ASSERT_TRUE(first);
  EXPECT_EQ(*first->attr("href"), "/story/2");
  EXPECT_TRUE(sel.matches(*first));
  EXPECT_EQ(css::selector("video").select_first(doc.root()), nullptr);
}

TEST(Selector, InvalidSyntaxThrows) {
  for (const char* s : {"", "a[", "a[href=", "::before", "a >", ", a", "a:nth-child(x)", "a:unknown", "#", "a..b",
                        "a:not(", "[=x]"})
    EXPECT_TRUE(throws_code([&] { css::selector{s}; }, errc::invalid_selector)) << s;
}

TEST(Selector, EscapedIdentifiers) {
  const html::document doc(R"(<div class="a:b"><span id="x.y">z</span></div>)");
  EXPECT_EQ(texts(doc, R"(.a\:b #x\.y)"), strings{"z"});
}
