#include <doctest.h>

#include <string>
#include <vector>

#include "mvsenti/preprocess.hpp"
#include "testutil.hpp"

using namespace mvsenti;
using testutil::ScratchDir;
using testutil::write_file;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds_of(std::string_view text) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const Token& t : tokenize(text)) out.emplace_back(t.kind, t.text);
  return out;
}

}  // namespace

TEST_CASE("casefold: ASCII and Latin-1, multiplication sign excluded") {
  CHECK(casefold("ABC xyz 123") == "abc xyz 123");
  CHECK(casefold("\xC3\x80") == "\xC3\xA0");    // A-grave to a-grave
  CHECK(casefold("\xC3\x9E") == "\xC3\xBE");    // thorn
  CHECK(casefold("\xC3\x97") == "\xC3\x97");    // multiplication sign unchanged
  CHECK(casefold("\xD0\x90") == "\xD0\x90");    // Cyrillic A passes through
  CHECK(casefold("") == "");
}

TEST_CASE("html entities: the five named ones, single left-to-right pass") {
  CHECK(decode_html_entities("a &amp; b") == "a & b");
  CHECK(decode_html_entities("&lt;tag&gt;") == "<tag>");
  CHECK(decode_html_entities("&quot;hi&apos;") == "\"hi'");
  CHECK(decode_html_entities("&amp;lt;") == "&lt;");  // no re-scan of output
  CHECK(decode_html_entities("&bogus; &am p;") == "&bogus; &am p;");
  CHECK(decode_html_entities("&amp") == "&amp");  // unterminated
}

TEST_CASE("tokenize: frozen mixed tweet") {
  auto got = kinds_of("@Alice I LOVE this!! :-) http://T.co/Ab1 #GreatDay &amp; more");
  std::vector<std::pair<TokenKind, std::string>> want = {
      {TokenKind::Mention, "@alice"},   {TokenKind::Word, "i"},
      {TokenKind::Word, "love"},        {TokenKind::Word, "this"},
      {TokenKind::Punctuation, "!"},    {TokenKind::Punctuation, "!"},
      {TokenKind::Emoticon, ":-)"},     {TokenKind::Url, "http://t.co/ab1"},
      {TokenKind::Hashtag, "#greatday"},{TokenKind::Punctuation, "&"},
      {TokenKind::Word, "amp"},         {TokenKind::Punctuation, ";"},
      {TokenKind::Word, "more"},
  };
  CHECK(got == want);
}

TEST_CASE("tokenize: frozen url, hyphen, number, tag, emoticon mix") {
  auto got = kinds_of("Check www.Example.com/x?q=1 it's well-known -3,14% <b>bold</b> :))) o_O");
  std::vector<std::pair<TokenKind, std::string>> want = {
      {TokenKind::Word, "check"},
      {TokenKind::Url, "www.example.com/x?q=1"},
      {TokenKind::Word, "it's"},
      {TokenKind::HyphenatedWord, "well-known"},
      {TokenKind::Number, "-3,14%"},
      {TokenKind::HtmlTag, "<b>"},
      {TokenKind::Word, "bold"},
      {TokenKind::HtmlTag, "</b>"},
      {TokenKind::Emoticon, ":)"},
      {TokenKind::Punctuation, ")"},
      {TokenKind::Punctuation, ")"},
      {TokenKind::Emoticon, "o_o"},
  };
  CHECK(got == want);
}

TEST_CASE("tokenize: words exclude digits, apostrophes glue") {
  auto got = kinds_of("rock'n'roll 10.5% U2 can't-stop");
  std::vector<std::pair<TokenKind, std::string>> want = {
      {TokenKind::Word, "rock'n'roll"},
      {TokenKind::Number, "10.5%"},
      {TokenKind::Word, "u"},
      {TokenKind::Number, "2"},
      {TokenKind::HyphenatedWord, "can't-stop"},
  };
  CHECK(got == want);
}

TEST_CASE("tokenize: no token spans whitespace, empty input") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t \n ").empty());
  auto toks = tokenize("a b");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].text == "a");
  CHECK(toks[1].text == "b");
}

TEST_CASE("stopword list: file loading, comments, casefolding of queries") {
  ScratchDir dir;
  auto p = dir.file("stop.txt");
  write_file(p, "# comment line\nthe\na\n\nis\n");
  StopwordList sw = StopwordList::load(p);
  CHECK(sw.size() == 3);
  CHECK(sw.contains("the"));
  CHECK(sw.contains("is"));
  CHECK(!sw.contains("# comment line"));
  CHECK(!sw.contains(""));

  auto words = sw.sorted_words();
  REQUIRE(words.size() == 3);
  CHECK(words[0] == "a");
  CHECK(words[1] == "is");
  CHECK(words[2] == "the");
}

TEST_CASE("filter: kinds kept and dropped, stopwords, drop_urls") {
  StopwordList sw = StopwordList::from_words({"the", "is"});
  auto toks = tokenize("The cat IS on http://x.co @bob #tag <b> :-) 42 well-known !");

  auto kept = filter_tokens(toks, sw);
  std::vector<std::string> want = {"cat", "on", "http://x.co", ":-)", "42",
                                   "well-known"};
  CHECK(kept == want);

  FilterOptions no_urls;
  no_urls.drop_urls = true;
  auto kept2 = filter_tokens(toks, sw, no_urls);
  std::vector<std::string> want2 = {"cat", "on", ":-)", "42", "well-known"};
  CHECK(kept2 == want2);
}

TEST_CASE("preprocess: full pipeline decodes entities before tokenizing") {
  StopwordList sw;
  auto got = preprocess("&amp;co ROCKS :-)", sw);
  // "&amp;co" decodes to "&co"; "&" is punctuation, "co" a word
  std::vector<std::string> want = {"co", "rocks", ":-)"};
  CHECK(got == want);

  StopwordList sw2 = StopwordList::from_words({"rocks"});
  auto got2 = preprocess("&amp;co ROCKS :-)", sw2);
  std::vector<std::string> want2 = {"co", ":-)"};
  CHECK(got2 == want2);
}

TEST_CASE("emoticon list is canonical lowercase and covers the basics") {
  const auto& emo = emoticon_list();
  CHECK(!emo.empty());
  auto has = [&](const std::string& s) {
    for (const auto& e : emo)
      if (e == s) return true;
    return false;
  };
  CHECK(has(":)"));
  CHECK(has(":-("));
  CHECK(has("<3"));
  CHECK(has("xd"));
  for (const auto& e : emo) CHECK(e == casefold(e));
}
