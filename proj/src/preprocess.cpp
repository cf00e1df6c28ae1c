#include "mvsenti/preprocess.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "mvsenti/errors.hpp"

namespace mvsenti {

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Word: return "Word";
    case TokenKind::HyphenatedWord: return "HyphenatedWord";
    case TokenKind::Emoticon: return "Emoticon";
    case TokenKind::Url: return "Url";
    case TokenKind::Mention: return "Mention";
    case TokenKind::Hashtag: return "Hashtag";
    case TokenKind::Number: return "Number";
    case TokenKind::HtmlTag: return "HtmlTag";
    case TokenKind::Punctuation: return "Punctuation";
  }
  return "?";
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoFailure, "cannot open stopword file " + path.string());
  StopwordList list;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    list.words_.insert(casefold(line));
  }
  if (in.bad()) raise(Errc::IoFailure, "read error on " + path.string());
  return list;
}

StopwordList StopwordList::from_words(const std::vector<std::string>& words) {
  StopwordList list;
  for (const auto& w : words) list.words_.insert(casefold(w));
  return list;
}

std::vector<std::string> StopwordList::sorted_words() const {
  std::vector<std::string> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string casefold(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    unsigned char c = static_cast<unsigned char>(utf8[i]);
    if (c < 0x80) {
      if (c >= 'A' && c <= 'Z') c += 0x20;
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    // Latin-1 supplement: U+00C0..U+00DE fold to +0x20, except U+00D7.
    if (c == 0xC3 && i + 1 < utf8.size()) {
      unsigned char c2 = static_cast<unsigned char>(utf8[i + 1]);
      if (c2 >= 0x80 && c2 <= 0x9E && c2 != 0x97) {
        out.push_back(static_cast<char>(0xC3));
        out.push_back(static_cast<char>(c2 + 0x20));
        i += 2;
        continue;
      }
    }
    out.push_back(static_cast<char>(c));
    ++i;
  }
  return out;
}

std::string decode_html_entities(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, char>, 5> kEntities = {{
      {"&amp;", '&'},
      {"&lt;", '<'},
      {"&gt;", '>'},
      {"&quot;", '"'},
      {"&apos;", '\''},
  }};
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&') {
      bool decoded = false;
      for (const auto& [name, ch] : kEntities) {
        if (text.substr(i, name.size()) == name) {
          out.push_back(ch);
          i += name.size();
          decoded = true;
          break;
        }
      }
      if (decoded) continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

const std::vector<std::string>& emoticon_list() {
  static const std::vector<std::string> kEmoticons = {
      ":)", ":-)", ":(", ":-(", ";)", ";-)", ";(", ";-(",
      ":d", ":-d", ":p", ":-p", ":o", ":-o", ":s", ":-s", ":x", ":-x",
      ":/", ":-/", ":\\", ":-\\", ":|", ":-|", ":*", ":-*",
      ":]", ":[", ":-]", ":-[", ":}", ":{",
      "=)", "=(", "=d", "=p", "=/", "=\\", "=]", "=[", "=|",
      ":')", ":'(", ":'-)", ":'-(", ";d", ";p", ";-d", ";-p",
      "xd", "x-d", "xp", "x-p",
      "8)", "8-)", "8(", "8-(", "b)", "b-)",
      ">:(", ">:)", ">:d", ">:/",
      "d:", "d-:", ":c", "c:", ":v", ":3", "<3", "</3",
      "^^", "^_^", "^-^", "-_-", "-.-", "o_o", "o.o", "0_0", "._.",
      "\\o/", "\\m/",
  };
  return kEmoticons;
}

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_ascii_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_ident(unsigned char c) { return is_ascii_letter(c) || is_digit(c) || c == '_'; }

// Word characters: ASCII letters plus every byte >= 0x80, so multi-byte
// UTF-8 sequences stay glued to the word they appear in.
bool is_word_char(unsigned char c) { return is_ascii_letter(c) || c >= 0x80; }

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (pos_ < text_.size()) {
      if (is_space(at(pos_))) {
        ++pos_;
        continue;
      }
      std::size_t len;
      TokenKind kind;
      if ((len = match_html_tag()) > 0) kind = TokenKind::HtmlTag;
      else if ((len = match_url()) > 0) kind = TokenKind::Url;
      else if ((len = match_mention()) > 0) kind = TokenKind::Mention;
      else if ((len = match_hashtag()) > 0) kind = TokenKind::Hashtag;
      else if ((len = match_emoticon()) > 0) kind = TokenKind::Emoticon;
      else if ((len = match_number()) > 0) kind = TokenKind::Number;
      else {
        bool hyphenated = false;
        if ((len = match_word(hyphenated)) > 0) {
          kind = hyphenated ? TokenKind::HyphenatedWord : TokenKind::Word;
        } else {
          len = codepoint_len();
          kind = TokenKind::Punctuation;
        }
      }
      tokens.push_back({std::string(text_.substr(pos_, len)), kind});
      pos_ += len;
    }
    return tokens;
  }

 private:
  unsigned char at(std::size_t i) const { return static_cast<unsigned char>(text_[i]); }
  bool in_range(std::size_t i) const { return i < text_.size(); }

  // '<' [^> ws]* '>'
  std::size_t match_html_tag() {
    if (at(pos_) != '<') return 0;
    std::size_t i = pos_ + 1;
    while (in_range(i) && at(i) != '>' && !is_space(at(i))) ++i;
    if (!in_range(i) || at(i) != '>') return 0;
    return i + 1 - pos_;
  }

  // http:// | https:// | www.  then up to whitespace
  std::size_t match_url() {
    static constexpr std::string_view kPrefixes[] = {"http://", "https://", "www."};
    std::string_view rest = text_.substr(pos_);
    for (std::string_view prefix : kPrefixes) {
      if (rest.size() >= prefix.size() &&
          std::equal(prefix.begin(), prefix.end(), rest.begin(),
                     [](char a, char b) {
                       return a == (b >= 'A' && b <= 'Z' ? b + 0x20 : b);
                     })) {
        std::size_t i = pos_ + prefix.size();
        while (in_range(i) && !is_space(at(i))) ++i;
        return i - pos_;
      }
    }
    return 0;
  }

  std::size_t match_sigil_run(char sigil) {
    if (at(pos_) != sigil) return 0;
    std::size_t i = pos_ + 1;
    while (in_range(i) && is_ident(at(i))) ++i;
    return i - pos_ - 1 > 0 ? i - pos_ : 0;
  }

  std::size_t match_mention() { return match_sigil_run('@'); }
  std::size_t match_hashtag() { return match_sigil_run('#'); }

  // Longest case-insensitive list member; letter-final emoticons require a
  // non-word boundary so ":pizza" does not begin with ":p".
  std::size_t match_emoticon() {
    std::size_t best = 0;
    char best_last = 0;
    for (const std::string& emo : emoticon_list()) {
      if (emo.size() <= best) continue;
      if (pos_ + emo.size() > text_.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < emo.size(); ++k) {
        unsigned char c = at(pos_ + k);
        if (c >= 'A' && c <= 'Z') c += 0x20;
        if (static_cast<char>(c) != emo[k]) {
          match = false;
          break;
        }
      }
      if (match) {
        best = emo.size();
        best_last = emo.back();
      }
    }
    if (best > 0 && is_ascii_letter(best_last) && in_range(pos_ + best) &&
        (is_word_char(at(pos_ + best)) || is_digit(at(pos_ + best))))
      return 0;
    return best;
  }

  // [+-]? digit+ ([.,] digit+)? %?
  std::size_t match_number() {
    std::size_t i = pos_;
    if (at(i) == '+' || at(i) == '-') ++i;
    std::size_t digits_start = i;
    while (in_range(i) && is_digit(at(i))) ++i;
    if (i == digits_start) return 0;
    if (in_range(i) && (at(i) == '.' || at(i) == ',') && in_range(i + 1) &&
        is_digit(at(i + 1))) {
      ++i;
      while (in_range(i) && is_digit(at(i))) ++i;
    }
    if (in_range(i) && at(i) == '%') ++i;
    return i - pos_;
  }

  // wordcore := wchar+ ("'" wchar+)* ; word := wordcore ("-" wordcore)*
  std::size_t match_wordcore(std::size_t start) {
    std::size_t i = start;
    while (in_range(i) && is_word_char(at(i))) ++i;
    if (i == start) return 0;
    while (in_range(i) && at(i) == '\'' && in_range(i + 1) && is_word_char(at(i + 1))) {
      i += 2;
      while (in_range(i) && is_word_char(at(i))) ++i;
    }
    return i - start;
  }

  std::size_t match_word(bool& hyphenated) {
    std::size_t core = match_wordcore(pos_);
    if (core == 0) return 0;
    std::size_t i = pos_ + core;
    hyphenated = false;
    while (in_range(i) && at(i) == '-') {
      std::size_t next = match_wordcore(i + 1);
      if (next == 0) break;
      i += 1 + next;
      hyphenated = true;
    }
    return i - pos_;
  }

  std::size_t codepoint_len() {
    unsigned char c = at(pos_);
    std::size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    len = std::min(len, text_.size() - pos_);
    // swallow continuation bytes even if the lead byte promised fewer
    while (pos_ + len < text_.size() && (at(pos_ + len) & 0xC0) == 0x80 && len < 4)
      ++len;
    return len;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::string folded = casefold(text);
  return Scanner(folded).run();
}

std::vector<std::string> filter_tokens(const std::vector<Token>& tokens,
                                       const StopwordList& stopwords,
                                       const FilterOptions& options) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& tok : tokens) {
    switch (tok.kind) {
      case TokenKind::Mention:
      case TokenKind::Hashtag:
      case TokenKind::Punctuation:
      case TokenKind::HtmlTag:
        continue;
      case TokenKind::Url:
        if (options.drop_urls) continue;
        break;
      case TokenKind::Word:
        if (stopwords.contains(casefold(tok.text))) continue;
        break;
      default:
        break;
    }
    out.push_back(tok.text);
  }
  return out;
}

std::vector<std::string> preprocess(std::string_view text,
                                    const StopwordList& stopwords,
                                    const FilterOptions& options) {
  std::string folded = casefold(text);
  std::string decoded = decode_html_entities(folded);
  return filter_tokens(tokenize(decoded), stopwords, options);
}

}  // namespace mvsenti
