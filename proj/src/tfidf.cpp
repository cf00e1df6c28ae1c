#include "mvsenti/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mvsenti/errors.hpp"

namespace mvsenti {

TfIdfModel TfIdfModel::fit(const std::vector<TokenList>& corpus,
                           const TfIdfOptions& options) {
  if (corpus.empty()) {
    raise(Errc::EmptyCorpus, "tf-idf fit needs at least one document");
  }
  // std::map keeps terms sorted, which is exactly the index order we want.
  std::map<std::string, std::uint64_t> df;
  std::vector<std::string> distinct;
  for (const auto& doc : corpus) {
    distinct.assign(doc.begin(), doc.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (auto& tok : distinct) df[std::move(tok)] += 1;
  }

  TfIdfModel model;
  model.doc_count_ = corpus.size();
  model.options_ = options;
  for (auto& [term, count] : df) {
    if (count < options.min_df) continue;
    model.terms_.push_back(term);
    model.doc_freq_.push_back(count);
  }
  model.index_.reserve(model.terms_.size());
  for (std::uint32_t i = 0; i < model.terms_.size(); ++i) {
    model.index_.emplace(model.terms_[i], i);
  }
  model.compute_idf();
  return model;
}

TfIdfModel TfIdfModel::from_parts(std::vector<std::string> terms,
                                  std::vector<std::uint64_t> doc_freq,
                                  std::uint64_t doc_count,
                                  const TfIdfOptions& options) {
  if (terms.size() != doc_freq.size()) {
    raise(Errc::BundleCorrupt, "tf-idf terms and doc_freq length mismatch");
  }
  if (!std::is_sorted(terms.begin(), terms.end())) {
    raise(Errc::BundleCorrupt, "tf-idf terms not in lexicographic order");
  }
  TfIdfModel model;
  model.terms_ = std::move(terms);
  model.doc_freq_ = std::move(doc_freq);
  model.doc_count_ = doc_count;
  model.options_ = options;
  model.index_.reserve(model.terms_.size());
  for (std::uint32_t i = 0; i < model.terms_.size(); ++i) {
    model.index_.emplace(model.terms_[i], i);
  }
  model.compute_idf();
  return model;
}

void TfIdfModel::compute_idf() {
  idf_.resize(terms_.size());
  const double n = static_cast<double>(doc_count_);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const double df = static_cast<double>(doc_freq_[i]);
    if (options_.mode == IdfMode::Smoothed) {
      idf_[i] = std::log((1.0 + n) / (1.0 + df)) + 1.0;
    } else {
      idf_[i] = n / df;
    }
  }
}

SparseVector TfIdfModel::transform(const TokenList& tokens) const {
  // Collect counts of in-vocabulary terms, index-keyed so entries come out
  // sorted by index.
  std::map<std::uint32_t, double> counts;
  for (const auto& tok : tokens) {
    auto it = index_.find(tok);
    if (it != index_.end()) counts[it->second] += 1.0;
  }
  SparseVector vec;
  vec.dim = terms_.size();
  vec.entries.reserve(counts.size());
  for (auto& [idx, count] : counts) {
    vec.entries.push_back({idx, count * idf_[idx]});
  }
  if (options_.l2_normalize) {
    const double norm = l2_norm(vec);
    if (norm > 0.0) {
      for (auto& e : vec.entries) e.value /= norm;
    }
  }
  return vec;
}

std::unordered_map<std::string, double> TfIdfModel::term_weights(
    const TokenList& tokens) const {
  std::unordered_map<std::string, double> counts;
  for (const auto& tok : tokens) {
    if (index_.count(tok)) counts[tok] += 1.0;
  }
  for (auto& [term, value] : counts) {
    value *= idf_[index_.at(term)];
  }
  return counts;
}

long TfIdfModel::index_of(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

}  // namespace mvsenti
