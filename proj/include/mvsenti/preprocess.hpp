#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace mvsenti {

enum class TokenKind {
  Word,
  HyphenatedWord,
  Emoticon,
  Url,
  Mention,
  Hashtag,
  Number,
  HtmlTag,
  Punctuation,
};

const char* token_kind_name(TokenKind kind);

struct Token {
  std::string text;
  TokenKind kind;

  bool operator==(const Token&) const = default;
};

/// Lowercase word set loaded from a plain-text file (one word per line,
/// '#'-prefixed comment lines ignored).
class StopwordList {
 public:
  StopwordList() = default;
  static StopwordList load(const std::filesystem::path& path);
  static StopwordList from_words(const std::vector<std::string>& words);

  bool contains(std::string_view word) const {
    return words_.count(std::string(word)) > 0;
  }
  std::size_t size() const { return words_.size(); }

  /// Deterministic snapshot for serialization.
  std::vector<std::string> sorted_words() const;

 private:
  std::unordered_set<std::string> words_;
};

/// ASCII + Latin-1 simple casefold over UTF-8 text; other codepoints pass
/// through unchanged.
std::string casefold(std::string_view utf8);

/// Decodes the five standard named entities (&amp; &lt; &gt; &quot; &apos;),
/// single pass, left to right.
std::string decode_html_entities(std::string_view text);

/// Splits text into typed tokens. The whole input is casefolded first, then
/// scanned with matching precedence HtmlTag > Url > Mention > Hashtag >
/// Emoticon > Number > HyphenatedWord > Word > Punctuation. No token spans
/// whitespace; anything unmatched becomes a single-codepoint Punctuation.
std::vector<Token> tokenize(std::string_view text);

struct FilterOptions {
  bool drop_urls = false;
};

/// Keeps Word, HyphenatedWord, Emoticon, Number and Url token texts, drops
/// the rest plus any Word found in the stopword list.
std::vector<std::string> filter_tokens(const std::vector<Token>& tokens,
                                       const StopwordList& stopwords,
                                       const FilterOptions& options = {});

/// Full pipeline: casefold, entity decode, tokenize, filter.
std::vector<std::string> preprocess(std::string_view text,
                                    const StopwordList& stopwords,
                                    const FilterOptions& options = {});

/// The shipped emoticon surface list (lowercase canonical forms).
const std::vector<std::string>& emoticon_list();

}  // namespace mvsenti
