#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mvsenti/ensemble.hpp"

namespace mvsenti {

/// Everything a run needs, loadable from a flat TOML-style file and
/// overridable per key by the same-named CLI flag.
struct RunConfig {
  // paths
  std::vector<std::string> train_files;
  std::string test_file;
  std::string input_file;
  std::string predictions_file = "predictions.tsv";
  std::string report_file = "report.json";
  std::string embeddings_file;
  std::string embedding_format = "auto";  // auto | binary | text
  std::string stopwords_file;
  std::string bundle_file = "model.mvsb";

  // features
  std::string tfidf_mode = "smoothed";  // smoothed | raw
  std::int64_t tfidf_min_df = 1;
  std::int64_t oov_seed = 0;
  bool drop_urls = false;

  // views: "vectorizer:classifier" with vectorizer tfidf|mean|wmean and
  // classifier svm_ovo|logreg_ovr; weights default to 1.0 each
  std::vector<std::string> views = {"tfidf:svm_ovo", "mean:svm_ovo",
                                    "wmean:logreg_ovr"};
  std::vector<double> view_weights;

  // training
  double regularization_c = 1.0;
  std::int64_t max_epochs = 200;
  double tolerance = 1e-6;
  double eta0 = 0.1;
  std::int64_t seed = 0;
};

/// Reads `key = value` lines (strings, integers, floats, booleans and
/// single-line arrays; # comments) into cfg. Unknown keys, duplicate keys
/// and type mismatches are ConfigError.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Parses "vectorizer:classifier", e.g. "tfidf:svm_ovo".
ViewSpec parse_view_spec(const std::string& text);

/// Validates ranges and assembles the ensemble configuration (views with
/// weights, tf-idf options, OOV policy, solver settings).
EnsembleConfig to_ensemble_config(const RunConfig& cfg);

/// Returns cfg.embedding_format checked against {auto, binary, text}.
std::string validated_embedding_format(const RunConfig& cfg);

/// Loads the embedding table honoring embedding_format.
EmbeddingTable load_embeddings(const RunConfig& cfg);

}  // namespace mvsenti
