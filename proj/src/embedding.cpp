#include "mvsenti/embedding.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "mvsenti/errors.hpp"
#include "mvsenti/rng.hpp"

namespace mvsenti {

namespace {

constexpr std::size_t kMaxWordBytes = 4096;

float float_from_le(const unsigned char* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                       static_cast<std::uint32_t>(p[1]) << 8 |
                       static_cast<std::uint32_t>(p[2]) << 16 |
                       static_cast<std::uint32_t>(p[3]) << 24;
  return std::bit_cast<float>(bits);
}

bool parse_u64(std::string_view text, std::uint64_t& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

}  // namespace

void EmbeddingTable::push_row(std::string word, const float* values) {
  auto [it, inserted] =
      index_.emplace(std::move(word), static_cast<std::uint32_t>(words_.size()));
  if (!inserted) return;  // first occurrence wins
  words_.push_back(it->first);
  data_.insert(data_.end(), values, values + dim_);
}

const float* EmbeddingTable::row(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return nullptr;
  return data_.data() + static_cast<std::size_t>(it->second) * dim_;
}

EmbeddingTable EmbeddingTable::load_word2vec_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoFailure, "cannot open embedding file: " + path);

  std::string header;
  if (!std::getline(in, header)) {
    raise(Errc::MalformedHeader, path + ": missing header line");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  auto fields = split_ws(header);
  std::uint64_t vocab_size = 0, dim = 0;
  if (fields.size() != 2 || !parse_u64(fields[0], vocab_size) ||
      !parse_u64(fields[1], dim)) {
    raise(Errc::MalformedHeader,
          path + ": header must be \"<vocab_size> <dim>\", got \"" + header + "\"");
  }
  if (dim == 0) raise(Errc::DimensionZero, path + ": header declares dim 0");

  EmbeddingTable table;
  table.dim_ = dim;
  // Reserve for the declared size, but never beyond what the file could
  // actually hold (a corrupt header must fail as truncation, not bad_alloc).
  const auto body_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto file_end = in.tellg();
  in.seekg(body_start);
  if (body_start != std::streampos(-1) && file_end != std::streampos(-1)) {
    const std::uint64_t body = static_cast<std::uint64_t>(file_end - body_start);
    const std::uint64_t fits = body / (2 + dim * 4);
    const std::uint64_t n = std::min(vocab_size, fits + 1);
    table.words_.reserve(n);
    table.data_.reserve(n * dim);
  }

  std::vector<unsigned char> raw(dim * 4);
  std::vector<float> vec(dim);
  std::string word;
  for (std::uint64_t entry = 0; entry < vocab_size; ++entry) {
    int c = in.get();
    while (c == '\n' || c == '\r' || c == ' ') c = in.get();
    if (c == EOF) {
      raise(Errc::TruncatedFile,
            path + ": ended after " + std::to_string(entry) + " of " +
                std::to_string(vocab_size) + " entries");
    }
    word.clear();
    while (c != ' ') {
      if (c == EOF) {
        raise(Errc::TruncatedFile, path + ": ended inside word of entry " +
                                       std::to_string(entry));
      }
      word.push_back(static_cast<char>(c));
      if (word.size() > kMaxWordBytes) {
        raise(Errc::MalformedRecord,
              path + ": word longer than " + std::to_string(kMaxWordBytes) +
                  " bytes at entry " + std::to_string(entry) +
                  " (missing separator?)");
      }
      c = in.get();
    }
    if (word.empty()) {
      raise(Errc::MalformedRecord, path + ": empty word at entry " +
                                       std::to_string(entry));
    }
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      raise(Errc::TruncatedFile, path + ": ended inside vector of \"" + word +
                                     "\" at entry " + std::to_string(entry));
    }
    for (std::uint64_t d = 0; d < dim; ++d) {
      vec[d] = float_from_le(raw.data() + d * 4);
      if (!std::isfinite(vec[d])) {
        raise(Errc::MalformedRecord, path + ": non-finite component in \"" +
                                         word + "\" at entry " +
                                         std::to_string(entry));
      }
    }
    table.push_row(word, vec.data());
  }
  // Only separators may remain after the declared entries.
  int c = in.get();
  while (c == '\n' || c == '\r' || c == ' ') c = in.get();
  if (c != EOF) {
    raise(Errc::MalformedRecord,
          path + ": trailing bytes after " + std::to_string(vocab_size) +
              " declared entries");
  }
  return table;
}

EmbeddingTable EmbeddingTable::load_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoFailure, "cannot open embedding file: " + path);

  EmbeddingTable table;
  std::uint64_t declared = 0;
  bool has_header = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<float> vec;

  auto parse_record = [&](const std::vector<std::string_view>& fields) {
    if (table.dim_ == 0) {
      if (fields.size() < 2) {
        raise(Errc::MalformedRecord, path + ":" + std::to_string(line_no) +
                                         ": expected word plus components");
      }
      table.dim_ = fields.size() - 1;
      vec.resize(table.dim_);
    } else if (fields.size() != table.dim_ + 1) {
      raise(Errc::MalformedRecord,
            path + ":" + std::to_string(line_no) + ": expected " +
                std::to_string(table.dim_) + " components, got " +
                std::to_string(fields.size() - 1));
    }
    for (std::size_t d = 0; d < table.dim_; ++d) {
      auto f = fields[d + 1];
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size() ||
          !std::isfinite(value)) {
        raise(Errc::MalformedRecord, path + ":" + std::to_string(line_no) +
                                         ": bad component \"" +
                                         std::string(f) + "\"");
      }
      vec[d] = static_cast<float>(value);
    }
    table.push_row(std::string(fields[0]), vec.data());
  };

  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      std::uint64_t a = 0, b = 0;
      if (fields.size() == 2 && parse_u64(fields[0], a) && parse_u64(fields[1], b)) {
        has_header = true;
        declared = a;
        if (b == 0) raise(Errc::DimensionZero, path + ": header declares dim 0");
        table.dim_ = b;
        vec.resize(table.dim_);
        continue;
      }
    }
    parse_record(fields);
  }
  if (first) raise(Errc::MalformedHeader, path + ": empty embedding file");
  if (has_header && table.size() < declared) {
    raise(Errc::TruncatedFile, path + ": header declares " +
                                   std::to_string(declared) + " entries, found " +
                                   std::to_string(table.size()));
  }
  if (table.dim_ == 0) raise(Errc::DimensionZero, path + ": no components");
  return table;
}

EmbeddingTable EmbeddingTable::load_auto(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoFailure, "cannot open embedding file: " + path);
  char buf[4096];
  in.read(buf, sizeof buf);
  std::streamsize got = in.gcount();
  bool binary = false;
  for (std::streamsize i = 0; i < got; ++i) {
    unsigned char c = static_cast<unsigned char>(buf[i]);
    if (c < 0x09 || (c >= 0x0E && c < 0x20)) {
      binary = true;
      break;
    }
  }
  in.close();
  return binary ? load_word2vec_binary(path) : load_text(path);
}

EmbeddingTable EmbeddingTable::from_vectors(
    const std::vector<std::pair<std::string, std::vector<float>>>& rows) {
  EmbeddingTable table;
  for (const auto& [word, values] : rows) {
    if (table.dim_ == 0) {
      if (values.empty()) raise(Errc::DimensionZero, "zero-length vector for \"" + word + "\"");
      table.dim_ = values.size();
    } else if (values.size() != table.dim_) {
      raise(Errc::DimensionMismatch,
            "vector for \"" + word + "\" has " + std::to_string(values.size()) +
                " components, expected " + std::to_string(table.dim_));
    }
    table.push_row(word, values.data());
  }
  return table;
}

DenseVector oov_vector(std::size_t dim, std::string_view doc_key,
                       const OovPolicy& policy) {
  SplitMix64 rng(hash_bytes(doc_key, policy.seed));
  DenseVector v(dim);
  const double hw = policy.range_half_width;
  for (std::size_t d = 0; d < dim; ++d) v[d] = rng.uniform(-hw, hw);
  return v;
}

DenseVector combine_mean(const EmbeddingTable& table, const TokenList& tokens,
                         std::string_view doc_key, const OovPolicy& policy) {
  DenseVector sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& tok : tokens) {
    const float* r = table.row(tok);
    if (!r) continue;
    for (std::size_t d = 0; d < table.dim(); ++d) sum[d] += r[d];
    ++hits;
  }
  if (hits == 0) return oov_vector(table.dim(), doc_key, policy);
  for (double& x : sum) x /= static_cast<double>(hits);
  return sum;
}

DenseVector combine_weighted_mean(
    const EmbeddingTable& table, const TokenList& tokens,
    const std::unordered_map<std::string, double>& weights,
    std::string_view doc_key, const OovPolicy& policy) {
  DenseVector sum(table.dim(), 0.0);
  double total = 0.0;
  for (const auto& tok : tokens) {
    const float* r = table.row(tok);
    if (!r) continue;
    auto it = weights.find(tok);
    if (it == weights.end()) continue;
    const double w = it->second;
    for (std::size_t d = 0; d < table.dim(); ++d) sum[d] += w * r[d];
    total += w;
  }
  if (total <= 0.0) return combine_mean(table, tokens, doc_key, policy);
  for (double& x : sum) x /= total;
  return sum;
}

}  // namespace mvsenti
