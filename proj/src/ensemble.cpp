#include "mvsenti/ensemble.hpp"

#include <algorithm>
#include <string>

#include "mvsenti/errors.hpp"

namespace mvsenti {

const char* vectorizer_name(VectorizerKind kind) {
  switch (kind) {
    case VectorizerKind::TfIdfBow: return "tfidf";
    case VectorizerKind::MeanEmbedding: return "mean";
    case VectorizerKind::WeightedMeanEmbedding: return "wmean";
  }
  return "?";
}

const char* view_classifier_name(ViewClassifier kind) {
  switch (kind) {
    case ViewClassifier::SvmOvO: return "svm_ovo";
    case ViewClassifier::LogisticOvR: return "logreg_ovr";
  }
  return "?";
}

std::vector<ViewSpec> default_views() {
  return {
      {VectorizerKind::TfIdfBow, ViewClassifier::SvmOvO, 1.0},
      {VectorizerKind::MeanEmbedding, ViewClassifier::SvmOvO, 1.0},
      {VectorizerKind::WeightedMeanEmbedding, ViewClassifier::LogisticOvR, 1.0},
  };
}

DenseVector soft_vote(const std::vector<DenseVector>& dists,
                      const std::vector<double>& weights) {
  if (dists.empty()) raise(Errc::EmptyInput, "no distributions to vote over");
  if (dists.size() != weights.size()) {
    raise(Errc::LengthMismatch, std::to_string(dists.size()) +
                                    " distributions vs " +
                                    std::to_string(weights.size()) + " weights");
  }
  const std::size_t k = dists[0].size();
  double total = 0.0;
  DenseVector out(k, 0.0);
  for (std::size_t v = 0; v < dists.size(); ++v) {
    if (dists[v].size() != k) {
      raise(Errc::LengthMismatch, "distribution " + std::to_string(v) +
                                      " has length " +
                                      std::to_string(dists[v].size()) +
                                      ", expected " + std::to_string(k));
    }
    add_scaled(out, dists[v], weights[v]);
    total += weights[v];
  }
  if (total <= 0.0) raise(Errc::EmptyInput, "weight total must be positive");
  for (double& x : out) x /= total;
  return out;
}

std::size_t argmax_lowest(const DenseVector& values) {
  if (values.empty()) raise(Errc::EmptyInput, "argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

bool view_needs_tfidf(const ViewSpec& spec) {
  return spec.vectorizer == VectorizerKind::TfIdfBow ||
         spec.vectorizer == VectorizerKind::WeightedMeanEmbedding;
}

bool view_needs_embeddings(const ViewSpec& spec) {
  return spec.vectorizer == VectorizerKind::MeanEmbedding ||
         spec.vectorizer == VectorizerKind::WeightedMeanEmbedding;
}

bool EnsembleModel::needs_tfidf() const {
  return std::any_of(views.begin(), views.end(),
                     [](const ViewModel& v) { return view_needs_tfidf(v.spec); });
}

bool EnsembleModel::needs_embeddings() const {
  return std::any_of(views.begin(), views.end(), [](const ViewModel& v) {
    return view_needs_embeddings(v.spec);
  });
}

std::vector<std::string> EnsembleModel::tokens_for(const Document& doc) const {
  return preprocess(doc.text, stopwords, filter);
}

DenseVector EnsembleModel::view_features_dense(
    const ViewModel& view, const std::vector<std::string>& tokens,
    const Document& doc) const {
  if (view.spec.vectorizer == VectorizerKind::MeanEmbedding) {
    return combine_mean(*embeddings, tokens, doc.id, oov);
  }
  const auto weights = tfidf->term_weights(tokens);
  return combine_weighted_mean(*embeddings, tokens, weights, doc.id, oov);
}

std::vector<DenseVector> EnsembleModel::per_view_proba(const Document& doc) const {
  const auto tokens = tokens_for(doc);
  std::vector<DenseVector> dists;
  dists.reserve(views.size());
  for (const auto& view : views) {
    if (view.spec.vectorizer == VectorizerKind::TfIdfBow) {
      dists.push_back(view.classifier.predict_proba(tfidf->transform(tokens)));
    } else {
      dists.push_back(
          view.classifier.predict_proba(view_features_dense(view, tokens, doc)));
    }
  }
  return dists;
}

DenseVector EnsembleModel::predict_proba(const Document& doc) const {
  std::vector<double> weights;
  weights.reserve(views.size());
  for (const auto& view : views) weights.push_back(view.spec.weight);
  return soft_vote(per_view_proba(doc), weights);
}

Prediction EnsembleModel::predict(const Document& doc) const {
  Prediction pred;
  pred.distribution = predict_proba(doc);
  pred.label = static_cast<SentimentLabel>(
      static_cast<int>(argmax_lowest(pred.distribution)));
  return pred;
}

SentimentLabel EnsembleModel::predict_label(const Document& doc) const {
  return predict(doc).label;
}

std::vector<Prediction> EnsembleModel::predict_batch(
    const std::vector<Document>& docs) const {
  std::vector<Prediction> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(predict(doc));
  return out;
}

EnsembleModel fit_ensemble(const Dataset& dataset, const EnsembleConfig& config,
                           StopwordList stopwords,
                           std::shared_ptr<const EmbeddingTable> embeddings,
                           FitStats* stats) {
  if (dataset.empty()) raise(Errc::EmptyCorpus, "no training documents");

  std::vector<ViewSpec> active;
  for (const auto& spec : config.views) {
    if (spec.weight < 0.0) {
      raise(Errc::ConfigError, "view weight must be nonnegative");
    }
    if (spec.weight > 0.0) active.push_back(spec);
  }
  if (active.empty()) {
    raise(Errc::ConfigError, "at least one view needs a positive weight");
  }
  const bool any_embeddings = std::any_of(active.begin(), active.end(),
                                          view_needs_embeddings);
  if (any_embeddings && (!embeddings || embeddings->dim() == 0)) {
    raise(Errc::ConfigError, "embedding views configured but no table given");
  }

  EnsembleModel model;
  model.stopwords = std::move(stopwords);
  model.filter = config.filter;
  model.oov = config.oov;
  model.embeddings = std::move(embeddings);

  std::vector<TokenList> token_lists;
  std::vector<int> labels;
  token_lists.reserve(dataset.size());
  labels.reserve(dataset.size());
  for (const auto& ex : dataset) {
    token_lists.push_back(model.tokens_for(ex.doc));
    labels.push_back(static_cast<int>(ex.label));
  }

  const bool any_tfidf = std::any_of(active.begin(), active.end(), view_needs_tfidf);
  if (any_tfidf) {
    model.tfidf = TfIdfModel::fit(token_lists, config.tfidf);
  }

  if (stats) stats->views.clear();
  for (const auto& spec : active) {
    const auto strategy = spec.classifier == ViewClassifier::SvmOvO
                              ? MulticlassStrategy::OneVsOne
                              : MulticlassStrategy::OneVsRest;
    const auto loss = spec.classifier == ViewClassifier::SvmOvO
                          ? LossKind::Hinge
                          : LossKind::Logistic;
    ViewModel view;
    view.spec = spec;
    std::size_t correct = 0;
    if (spec.vectorizer == VectorizerKind::TfIdfBow) {
      std::vector<SparseVector> features;
      features.reserve(token_lists.size());
      for (const auto& tokens : token_lists) {
        features.push_back(model.tfidf->transform(tokens));
      }
      view.classifier = fit_multiclass(features, labels, kNumClasses, strategy,
                                       loss, config.train);
      if (stats) {
        for (std::size_t i = 0; i < features.size(); ++i) {
          const auto proba = view.classifier.predict_proba(features[i]);
          if (static_cast<int>(argmax_lowest(proba)) == labels[i]) ++correct;
        }
      }
    } else {
      std::vector<DenseVector> features;
      features.reserve(token_lists.size());
      for (std::size_t i = 0; i < token_lists.size(); ++i) {
        if (spec.vectorizer == VectorizerKind::MeanEmbedding) {
          features.push_back(combine_mean(*model.embeddings, token_lists[i],
                                          dataset[i].doc.id, model.oov));
        } else {
          const auto weights = model.tfidf->term_weights(token_lists[i]);
          features.push_back(combine_weighted_mean(*model.embeddings,
                                                   token_lists[i], weights,
                                                   dataset[i].doc.id, model.oov));
        }
      }
      view.classifier = fit_multiclass(features, labels, kNumClasses, strategy,
                                       loss, config.train);
      if (stats) {
        for (std::size_t i = 0; i < features.size(); ++i) {
          const auto proba = view.classifier.predict_proba(features[i]);
          if (static_cast<int>(argmax_lowest(proba)) == labels[i]) ++correct;
        }
      }
    }
    if (stats) {
      stats->views.push_back(
          {spec, static_cast<double>(correct) / static_cast<double>(dataset.size())});
    }
    model.views.push_back(std::move(view));
  }
  return model;
}

}  // namespace mvsenti
