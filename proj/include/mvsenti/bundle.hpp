#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mvsenti/config.hpp"
#include "mvsenti/ensemble.hpp"

namespace mvsenti {

inline constexpr std::uint32_t kBundleFormatVersion = 1;

/// Metadata summary used by the inspect command; reading it does not
/// require the embedding file.
struct BundleInfo {
  std::uint32_t format_version = 0;
  std::vector<std::string> views;  // "vectorizer:classifier" per view
  std::vector<double> view_weights;
  std::size_t vocabulary_size = 0;  // 0 when no tf-idf state is stored
  std::string embedding_digest;     // empty when no embedding views
  std::vector<std::string> class_order;
  std::size_t stopword_count = 0;
  bool needs_embeddings = false;
};

struct LoadedBundle {
  std::uint32_t format_version = 0;
  RunConfig config;  // snapshot taken at training time
  std::string embedding_digest;
  EnsembleModel model;
};

/// Single-file container: magic "MVSB", u32 format version, a
/// length-prefixed JSON metadata section, and a length-prefixed payload of
/// little-endian f64 weight arrays. No timestamps: retraining with the
/// same inputs and seed reproduces the file byte for byte. The write goes
/// through a temp file and rename.
void save_bundle(const std::filesystem::path& path, const EnsembleModel& model,
                 const RunConfig& config, const std::string& embedding_digest);

/// Rebuilds the model. embeddings may be null only when no view needs an
/// embedding table; the caller is responsible for digest verification.
LoadedBundle load_bundle(const std::filesystem::path& path,
                         std::shared_ptr<const EmbeddingTable> embeddings);

BundleInfo inspect_bundle(const std::filesystem::path& path);

}  // namespace mvsenti
