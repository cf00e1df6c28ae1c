#include "mvsenti/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <variant>

#include "mvsenti/errors.hpp"

namespace mvsenti {

namespace {

struct ConfigValue {
  // arrays hold only scalars
  std::variant<std::string, std::int64_t, double, bool,
               std::vector<ConfigValue>> data;

  bool is_array() const { return data.index() == 4; }
};

class LineParser {
 public:
  LineParser(std::string_view text, std::string where)
      : text_(text), where_(std::move(where)) {}

  std::string parse_key() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect_equals() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected '='");
    ++pos_;
  }

  ConfigValue parse_value() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar_word();
  }

  void expect_end() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] != '#') {
      fail("unexpected trailing characters");
    }
  }

 private:
  std::string_view text_;
  std::string where_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    raise(Errc::ConfigError, where_ + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  ConfigValue parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("dangling escape in string");
        char esc = text_[pos_++];
        switch (esc) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default: fail(std::string("unsupported escape \\") + esc);
        }
      } else {
        out.push_back(c);
      }
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;  // closing quote
    return ConfigValue{std::move(out)};
  }

  ConfigValue parse_array() {
    ++pos_;  // '['
    std::vector<ConfigValue> items;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ']') {
        ++pos_;
        break;
      }
      ConfigValue item = text_[pos_] == '"' ? parse_string() : parse_scalar_word();
      if (item.is_array()) fail("nested arrays are not supported");
      items.push_back(std::move(item));
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return ConfigValue{std::move(items)};
  }

  ConfigValue parse_scalar_word() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t' &&
           text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '#') {
      ++pos_;
    }
    std::string_view word = text_.substr(start, pos_ - start);
    if (word.empty()) fail("expected a value");
    if (word == "true") return ConfigValue{true};
    if (word == "false") return ConfigValue{false};
    // integer first, then float
    std::int64_t i = 0;
    auto [ip, iec] = std::from_chars(word.data(), word.data() + word.size(), i);
    if (iec == std::errc() && ip == word.data() + word.size()) {
      return ConfigValue{i};
    }
    double d = 0.0;
    auto [dp, dec] = std::from_chars(word.data(), word.data() + word.size(), d);
    if (dec == std::errc() && dp == word.data() + word.size()) {
      return ConfigValue{d};
    }
    fail("cannot parse value \"" + std::string(word) + "\" (strings need quotes)");
  }
};

const char* type_name(const ConfigValue& v) {
  switch (v.data.index()) {
    case 0: return "string";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "boolean";
    default: return "array";
  }
}

using Setter = std::function<void(RunConfig&, const ConfigValue&, const std::string&)>;

[[noreturn]] void type_error(const std::string& key, const char* want,
                             const ConfigValue& got) {
  raise(Errc::ConfigError,
        "key \"" + key + "\" expects " + want + ", got " + type_name(got));
}

Setter string_setter(std::string RunConfig::*field) {
  return [field](RunConfig& cfg, const ConfigValue& v, const std::string& key) {
    if (auto* s = std::get_if<std::string>(&v.data)) cfg.*field = *s;
    else type_error(key, "a string", v);
  };
}

Setter int_setter(std::int64_t RunConfig::*field) {
  return [field](RunConfig& cfg, const ConfigValue& v, const std::string& key) {
    if (auto* i = std::get_if<std::int64_t>(&v.data)) cfg.*field = *i;
    else type_error(key, "an integer", v);
  };
}

Setter float_setter(double RunConfig::*field) {
  return [field](RunConfig& cfg, const ConfigValue& v, const std::string& key) {
    if (auto* d = std::get_if<double>(&v.data)) cfg.*field = *d;
    else if (auto* i = std::get_if<std::int64_t>(&v.data)) cfg.*field = static_cast<double>(*i);
    else type_error(key, "a number", v);
  };
}

Setter bool_setter(bool RunConfig::*field) {
  return [field](RunConfig& cfg, const ConfigValue& v, const std::string& key) {
    if (auto* b = std::get_if<bool>(&v.data)) cfg.*field = *b;
    else type_error(key, "a boolean", v);
  };
}

Setter string_list_setter(std::vector<std::string> RunConfig::*field) {
  return [field](RunConfig& cfg, const ConfigValue& v, const std::string& key) {
    auto* arr = std::get_if<std::vector<ConfigValue>>(&v.data);
    if (!arr) type_error(key, "an array of strings", v);
    std::vector<std::string> out;
    for (const auto& item : *arr) {
      auto* s = std::get_if<std::string>(&item.data);
      if (!s) type_error(key, "an array of strings", item);
      out.push_back(*s);
    }
    cfg.*field = std::move(out);
  };
}

Setter float_list_setter(std::vector<double> RunConfig::*field) {
  return [field](RunConfig& cfg, const ConfigValue& v, const std::string& key) {
    auto* arr = std::get_if<std::vector<ConfigValue>>(&v.data);
    if (!arr) type_error(key, "an array of numbers", v);
    std::vector<double> out;
    for (const auto& item : *arr) {
      if (auto* d = std::get_if<double>(&item.data)) out.push_back(*d);
      else if (auto* i = std::get_if<std::int64_t>(&item.data)) out.push_back(static_cast<double>(*i));
      else type_error(key, "an array of numbers", item);
    }
    cfg.*field = std::move(out);
  };
}

const std::vector<std::pair<std::string, Setter>>& key_table() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"train_files", string_list_setter(&RunConfig::train_files)},
      {"test_file", string_setter(&RunConfig::test_file)},
      {"input_file", string_setter(&RunConfig::input_file)},
      {"predictions_file", string_setter(&RunConfig::predictions_file)},
      {"report_file", string_setter(&RunConfig::report_file)},
      {"embeddings_file", string_setter(&RunConfig::embeddings_file)},
      {"embedding_format", string_setter(&RunConfig::embedding_format)},
      {"stopwords_file", string_setter(&RunConfig::stopwords_file)},
      {"bundle_file", string_setter(&RunConfig::bundle_file)},
      {"tfidf_mode", string_setter(&RunConfig::tfidf_mode)},
      {"tfidf_min_df", int_setter(&RunConfig::tfidf_min_df)},
      {"oov_seed", int_setter(&RunConfig::oov_seed)},
      {"drop_urls", bool_setter(&RunConfig::drop_urls)},
      {"views", string_list_setter(&RunConfig::views)},
      {"view_weights", float_list_setter(&RunConfig::view_weights)},
      {"regularization_c", float_setter(&RunConfig::regularization_c)},
      {"max_epochs", int_setter(&RunConfig::max_epochs)},
      {"tolerance", float_setter(&RunConfig::tolerance)},
      {"eta0", float_setter(&RunConfig::eta0)},
      {"seed", int_setter(&RunConfig::seed)},
  };
  return table;
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoFailure, "cannot open config file: " + path.string());

  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    const std::string where = path.string() + ":" + std::to_string(line_no);
    LineParser parser(line, where);
    const std::string key = parser.parse_key();
    parser.expect_equals();
    const ConfigValue value = parser.parse_value();
    parser.expect_end();

    if (!seen.insert(key).second) {
      raise(Errc::ConfigError, where + ": duplicate key \"" + key + "\"");
    }
    bool known = false;
    for (const auto& [name, setter] : key_table()) {
      if (name == key) {
        setter(cfg, value, key);
        known = true;
        break;
      }
    }
    if (!known) raise(Errc::ConfigError, where + ": unknown key \"" + key + "\"");
  }
  if (in.bad()) raise(Errc::IoFailure, "read failed: " + path.string());
}

ViewSpec parse_view_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    raise(Errc::ConfigError,
          "view \"" + text + "\" must be \"vectorizer:classifier\"");
  }
  const std::string vec = text.substr(0, colon);
  const std::string clf = text.substr(colon + 1);
  ViewSpec spec;
  if (vec == "tfidf") spec.vectorizer = VectorizerKind::TfIdfBow;
  else if (vec == "mean") spec.vectorizer = VectorizerKind::MeanEmbedding;
  else if (vec == "wmean") spec.vectorizer = VectorizerKind::WeightedMeanEmbedding;
  else raise(Errc::ConfigError, "unknown vectorizer \"" + vec +
                                    "\" (want tfidf, mean or wmean)");
  if (clf == "svm_ovo") spec.classifier = ViewClassifier::SvmOvO;
  else if (clf == "logreg_ovr") spec.classifier = ViewClassifier::LogisticOvR;
  else raise(Errc::ConfigError, "unknown classifier \"" + clf +
                                    "\" (want svm_ovo or logreg_ovr)");
  return spec;
}

EnsembleConfig to_ensemble_config(const RunConfig& cfg) {
  EnsembleConfig out;

  if (cfg.views.empty()) raise(Errc::ConfigError, "views must not be empty");
  if (!cfg.view_weights.empty() && cfg.view_weights.size() != cfg.views.size()) {
    raise(Errc::ConfigError,
          "view_weights has " + std::to_string(cfg.view_weights.size()) +
              " entries for " + std::to_string(cfg.views.size()) + " views");
  }
  out.views.clear();
  double weight_total = 0.0;
  for (std::size_t i = 0; i < cfg.views.size(); ++i) {
    ViewSpec spec = parse_view_spec(cfg.views[i]);
    spec.weight = cfg.view_weights.empty() ? 1.0 : cfg.view_weights[i];
    if (!(spec.weight >= 0.0) || !std::isfinite(spec.weight)) {
      raise(Errc::ConfigError, "view weight must be a finite value >= 0");
    }
    weight_total += spec.weight;
    out.views.push_back(spec);
  }
  if (weight_total <= 0.0) {
    raise(Errc::ConfigError, "view weights must not all be zero");
  }

  if (cfg.tfidf_mode == "smoothed") {
    out.tfidf.mode = IdfMode::Smoothed;
    out.tfidf.l2_normalize = true;
  } else if (cfg.tfidf_mode == "raw") {
    out.tfidf.mode = IdfMode::RawRatio;
    out.tfidf.l2_normalize = false;
  } else {
    raise(Errc::ConfigError, "tfidf_mode must be \"smoothed\" or \"raw\", got \"" +
                                 cfg.tfidf_mode + "\"");
  }
  if (cfg.tfidf_min_df < 1) raise(Errc::ConfigError, "tfidf_min_df must be >= 1");
  out.tfidf.min_df = static_cast<std::size_t>(cfg.tfidf_min_df);

  if (cfg.oov_seed < 0) raise(Errc::ConfigError, "oov_seed must be >= 0");
  out.oov.seed = static_cast<std::uint64_t>(cfg.oov_seed);

  if (!(cfg.regularization_c > 0.0) || !std::isfinite(cfg.regularization_c)) {
    raise(Errc::ConfigError, "regularization_c must be > 0");
  }
  if (cfg.max_epochs < 1) raise(Errc::ConfigError, "max_epochs must be >= 1");
  if (!(cfg.tolerance >= 0.0)) raise(Errc::ConfigError, "tolerance must be >= 0");
  if (!(cfg.eta0 > 0.0) || !std::isfinite(cfg.eta0)) {
    raise(Errc::ConfigError, "eta0 must be > 0");
  }
  if (cfg.seed < 0) raise(Errc::ConfigError, "seed must be >= 0");
  out.train.regularization_c = cfg.regularization_c;
  out.train.max_epochs = static_cast<std::size_t>(cfg.max_epochs);
  out.train.tolerance = cfg.tolerance;
  out.train.eta0 = cfg.eta0;
  out.train.seed = static_cast<std::uint64_t>(cfg.seed);

  out.filter.drop_urls = cfg.drop_urls;
  return out;
}

std::string validated_embedding_format(const RunConfig& cfg) {
  if (cfg.embedding_format != "auto" && cfg.embedding_format != "binary" &&
      cfg.embedding_format != "text") {
    raise(Errc::ConfigError,
          "embedding_format must be auto, binary or text, got \"" +
              cfg.embedding_format + "\"");
  }
  return cfg.embedding_format;
}

EmbeddingTable load_embeddings(const RunConfig& cfg) {
  const std::string format = validated_embedding_format(cfg);
  if (cfg.embeddings_file.empty()) {
    raise(Errc::ConfigError, "embeddings_file is not set");
  }
  if (format == "binary") return EmbeddingTable::load_word2vec_binary(cfg.embeddings_file);
  if (format == "text") return EmbeddingTable::load_text(cfg.embeddings_file);
  return EmbeddingTable::load_auto(cfg.embeddings_file);
}

}  // namespace mvsenti
