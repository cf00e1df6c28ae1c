#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mvsenti/corpus.hpp"
#include "mvsenti/embedding.hpp"
#include "mvsenti/linear_model.hpp"
#include "mvsenti/preprocess.hpp"
#include "mvsenti/tfidf.hpp"
#include "mvsenti/vectors.hpp"

namespace mvsenti {

enum class VectorizerKind { TfIdfBow, MeanEmbedding, WeightedMeanEmbedding };
enum class ViewClassifier { SvmOvO, LogisticOvR };

const char* vectorizer_name(VectorizerKind kind);      // tfidf, mean, wmean
const char* view_classifier_name(ViewClassifier kind); // svm_ovo, logreg_ovr

struct ViewSpec {
  VectorizerKind vectorizer = VectorizerKind::TfIdfBow;
  ViewClassifier classifier = ViewClassifier::SvmOvO;
  double weight = 1.0;
};

/// The classic three-view lineup: tf-idf bag of words and plain mean
/// embeddings into one-vs-one SVMs, weighted mean embeddings into
/// one-vs-rest logistic regression, all equally weighted.
std::vector<ViewSpec> default_views();

struct EnsembleConfig {
  std::vector<ViewSpec> views = default_views();
  TfIdfOptions tfidf;
  OovPolicy oov;
  TrainConfig train;
  FilterOptions filter;
};

/// Weighted average of probability distributions, renormalized by the
/// weight total. All distributions must share one length; the weight
/// total must be positive.
DenseVector soft_vote(const std::vector<DenseVector>& dists,
                      const std::vector<double>& weights);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax_lowest(const DenseVector& values);

struct ViewModel {
  ViewSpec spec;
  MulticlassModel classifier;
};

struct Prediction {
  SentimentLabel label = SentimentLabel::Positive;
  DenseVector distribution;
};

struct FitStats {
  struct PerView {
    ViewSpec spec;
    double train_accuracy = 0.0;
  };
  std::vector<PerView> views;
};

/// A trained multi-view soft-voting classifier. Carries everything the
/// prediction path depends on: the stopword snapshot, filter options, the
/// fitted tf-idf vocabulary, the out-of-vocabulary policy and the per-view
/// linear models. The embedding table is injected (it is external data,
/// pinned by digest at the bundle layer).
class EnsembleModel {
 public:
  StopwordList stopwords;
  FilterOptions filter;
  std::optional<TfIdfModel> tfidf;
  std::shared_ptr<const EmbeddingTable> embeddings;
  OovPolicy oov;
  std::vector<ViewModel> views;

  bool needs_tfidf() const;
  bool needs_embeddings() const;

  std::vector<std::string> tokens_for(const Document& doc) const;

  /// Per-view distributions in view order, for inspection and voting.
  std::vector<DenseVector> per_view_proba(const Document& doc) const;

  /// Soft vote over the views, weighted by each view's spec weight.
  DenseVector predict_proba(const Document& doc) const;

  /// Label (argmax, ties to lowest canonical index) plus the distribution.
  Prediction predict(const Document& doc) const;
  SentimentLabel predict_label(const Document& doc) const;
  std::vector<Prediction> predict_batch(const std::vector<Document>& docs) const;

 private:
  DenseVector view_features_dense(const ViewModel& view,
                                  const std::vector<std::string>& tokens,
                                  const Document& doc) const;
};

bool view_needs_tfidf(const ViewSpec& spec);
bool view_needs_embeddings(const ViewSpec& spec);

/// Trains every positive-weight view on the dataset. Zero-weight views are
/// dropped. When stats is given it receives per-view training accuracy.
EnsembleModel fit_ensemble(const Dataset& dataset, const EnsembleConfig& config,
                           StopwordList stopwords,
                           std::shared_ptr<const EmbeddingTable> embeddings,
                           FitStats* stats = nullptr);

}  // namespace mvsenti
