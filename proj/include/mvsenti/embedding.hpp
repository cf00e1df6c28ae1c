#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mvsenti/tfidf.hpp"
#include "mvsenti/vectors.hpp"

namespace mvsenti {

/// Word vector lookup table. Rows are stored contiguously as float32 (the
/// on-disk precision of word2vec binaries); composition is done in double.
/// Duplicate words keep the first occurrence.
class EmbeddingTable {
 public:
  /// Reads the word2vec binary format: an ASCII header line
  /// "<vocab_size> <dim>\n", then per entry the word bytes, one 0x20, and
  /// dim little-endian float32 values, optionally followed by a newline.
  static EmbeddingTable load_word2vec_binary(const std::string& path);

  /// Reads a text table: one "word v1 .. vdim" line per entry, with an
  /// optional "<count> <dim>" header line.
  static EmbeddingTable load_text(const std::string& path);

  /// Sniffs binary vs text by looking for control bytes near the start,
  /// then delegates.
  static EmbeddingTable load_auto(const std::string& path);

  static EmbeddingTable from_vectors(
      const std::vector<std::pair<std::string, std::vector<float>>>& rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  /// Pointer to the dim() floats of a word, or nullptr when absent.
  const float* row(const std::string& word) const;

  const std::vector<std::string>& words() const { return words_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<float> data_;  // row-major, words_.size() x dim_
  std::unordered_map<std::string, std::uint32_t> index_;

  void push_row(std::string word, const float* values);
};

/// Out-of-vocabulary fallback: a random vector that is a pure function of
/// (seed, document key), components uniform in [-half_width, +half_width).
struct OovPolicy {
  std::uint64_t seed = 0;
  double range_half_width = 0.25;
};

DenseVector oov_vector(std::size_t dim, std::string_view doc_key,
                       const OovPolicy& policy);

/// Arithmetic mean of the vectors of all in-table token occurrences.
/// No token in the table: returns oov_vector for the document.
DenseVector combine_mean(const EmbeddingTable& table, const TokenList& tokens,
                         std::string_view doc_key, const OovPolicy& policy);

/// Weighted mean over occurrences that are both in the table and in the
/// weight map. A non-positive weight total falls back to combine_mean.
DenseVector combine_weighted_mean(
    const EmbeddingTable& table, const TokenList& tokens,
    const std::unordered_map<std::string, double>& weights,
    std::string_view doc_key, const OovPolicy& policy);

}  // namespace mvsenti
