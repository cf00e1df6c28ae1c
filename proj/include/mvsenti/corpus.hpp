#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvsenti {

/// Three-class message polarity. Canonical index order is
/// Positive=0, Negative=1, Neutral=2 for every matrix and distribution.
enum class SentimentLabel : int { Positive = 0, Negative = 1, Neutral = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<SentimentLabel, kNumClasses> kAllLabels = {
    SentimentLabel::Positive, SentimentLabel::Negative, SentimentLabel::Neutral};

std::string_view to_string(SentimentLabel label);

/// Case-insensitive parse of "positive"/"negative"/"neutral".
std::optional<SentimentLabel> parse_label(std::string_view text);

struct Document {
  std::string id;    // opaque, nonempty
  std::string text;  // raw message text, byte-for-byte from input
};

struct LabeledDocument {
  Document doc;
  SentimentLabel label;
};

using Dataset = std::vector<LabeledDocument>;

struct DatasetSummary {
  std::size_t total = 0;
  std::array<std::size_t, kNumClasses> per_class{};
};

/// Reads a TSV file of `id<TAB>label<TAB>text` lines. Blank and
/// whitespace-only lines are skipped; LF and CRLF both accepted.
Dataset load_labeled_dataset(const std::filesystem::path& path);

/// Reads a TSV file of `id<TAB>text` lines.
std::vector<Document> load_unlabeled_dataset(const std::filesystem::path& path);

DatasetSummary summarize(const Dataset& dataset);

/// Concatenation in argument order; duplicate ids preserved.
Dataset concat(const std::vector<Dataset>& datasets);

/// Deterministic seeded split; both parts keep the original document order.
std::pair<Dataset, Dataset> split_train_dev(const Dataset& dataset,
                                            double dev_fraction,
                                            std::uint64_t seed);

}  // namespace mvsenti
