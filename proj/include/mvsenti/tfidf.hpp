#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvsenti/vectors.hpp"

namespace mvsenti {

/// Idf weighting variants. Smoothed is ln((1+N)/(1+df)) + 1; RawRatio is
/// the plain ratio N/df with no logarithm.
enum class IdfMode { Smoothed, RawRatio };

struct TfIdfOptions {
  IdfMode mode = IdfMode::Smoothed;
  bool l2_normalize = true;
  std::size_t min_df = 1;
};

using TokenList = std::vector<std::string>;

/// Fitted vocabulary with document frequencies. Term indices are assigned
/// by ascending lexicographic (byte) order, so identical corpora produce
/// identical models on every platform. Immutable once fitted; transform is
/// safe to call concurrently.
class TfIdfModel {
 public:
  static TfIdfModel fit(const std::vector<TokenList>& corpus,
                        const TfIdfOptions& options = {});

  /// Rebuilds a model from serialized parts; idf is recomputed.
  static TfIdfModel from_parts(std::vector<std::string> terms,
                               std::vector<std::uint64_t> doc_freq,
                               std::uint64_t doc_count,
                               const TfIdfOptions& options);

  /// Term count times idf per in-vocabulary term; out-of-vocabulary tokens
  /// are skipped. L2-normalized when the model says so (zero vectors stay
  /// zero). dim equals the vocabulary size.
  SparseVector transform(const TokenList& tokens) const;

  /// Raw (pre-normalization) tf-idf weight of every distinct in-vocabulary
  /// term of this token list.
  std::unordered_map<std::string, double> term_weights(const TokenList& tokens) const;

  std::size_t vocabulary_size() const { return terms_.size(); }
  std::uint64_t doc_count() const { return doc_count_; }
  const TfIdfOptions& options() const { return options_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint64_t>& doc_freq() const { return doc_freq_; }
  const std::vector<double>& idf() const { return idf_; }

  /// Index of a term, or -1 if out of vocabulary.
  long index_of(const std::string& term) const;

 private:
  std::vector<std::string> terms_;           // lexicographic order
  std::vector<std::uint64_t> doc_freq_;      // parallel to terms_
  std::vector<double> idf_;                  // parallel to terms_
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t doc_count_ = 0;
  TfIdfOptions options_;

  void compute_idf();
};

}  // namespace mvsenti
