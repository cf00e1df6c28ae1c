#include "mvsenti/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "mvsenti/errors.hpp"
#include "mvsenti/rng.hpp"

namespace mvsenti {

std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Positive: return "positive";
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
  }
  return "?";
}

std::optional<SentimentLabel> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "positive") return SentimentLabel::Positive;
  if (lower == "negative") return SentimentLabel::Negative;
  if (lower == "neutral") return SentimentLabel::Neutral;
  return std::nullopt;
}

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

template <class OnRecord>
void for_each_record(const std::filesystem::path& path, std::size_t want_fields,
                     OnRecord&& on_record) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoFailure, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != want_fields)
      raise(Errc::MalformedLine, path.string() + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(want_fields) +
                                     " tab-separated columns, got " +
                                     std::to_string(fields.size()));
    if (fields[0].empty())
      raise(Errc::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": empty id column");
    on_record(std::move(fields), line_no);
  }
  if (in.bad()) raise(Errc::IoFailure, "read error on " + path.string());
}

}  // namespace

Dataset load_labeled_dataset(const std::filesystem::path& path) {
  Dataset out;
  for_each_record(path, 3, [&](std::vector<std::string> fields, std::size_t line_no) {
    auto label = parse_label(fields[1]);
    if (!label)
      raise(Errc::UnknownLabel, path.string() + ":" + std::to_string(line_no) +
                                    ": label \"" + fields[1] + "\"");
    out.push_back({{std::move(fields[0]), std::move(fields[2])}, *label});
  });
  return out;
}

std::vector<Document> load_unlabeled_dataset(const std::filesystem::path& path) {
  std::vector<Document> out;
  for_each_record(path, 2, [&](std::vector<std::string> fields, std::size_t) {
    out.push_back({std::move(fields[0]), std::move(fields[1])});
  });
  return out;
}

DatasetSummary summarize(const Dataset& dataset) {
  DatasetSummary s;
  s.total = dataset.size();
  for (const auto& rec : dataset) s.per_class[static_cast<int>(rec.label)] += 1;
  return s;
}

Dataset concat(const std::vector<Dataset>& datasets) {
  Dataset out;
  std::size_t total = 0;
  for (const auto& d : datasets) total += d.size();
  out.reserve(total);
  for (const auto& d : datasets) out.insert(out.end(), d.begin(), d.end());
  return out;
}

std::pair<Dataset, Dataset> split_train_dev(const Dataset& dataset,
                                            double dev_fraction,
                                            std::uint64_t seed) {
  if (dev_fraction < 0.0 || dev_fraction > 1.0)
    raise(Errc::ConfigError, "dev_fraction must be in [0, 1]");
  std::vector<std::size_t> indices(dataset.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  SplitMix64 rng(seed);
  rng.shuffle(indices);

  std::size_t dev_count =
      static_cast<std::size_t>(dev_fraction * static_cast<double>(dataset.size()));
  std::vector<std::size_t> dev_idx(indices.begin(), indices.begin() + dev_count);
  std::sort(dev_idx.begin(), dev_idx.end());

  Dataset train, dev;
  std::size_t next_dev = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (next_dev < dev_idx.size() && dev_idx[next_dev] == i) {
      dev.push_back(dataset[i]);
      ++next_dev;
    } else {
      train.push_back(dataset[i]);
    }
  }
  return {std::move(train), std::move(dev)};
}

}  // namespace mvsenti
