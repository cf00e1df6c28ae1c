#include "mvsenti/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "mvsenti/errors.hpp"

namespace mvsenti {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts)
    for (std::uint64_t c : row) sum += c;
  return sum;
}

ConfusionMatrix confusion(const std::vector<SentimentLabel>& gold,
                          const std::vector<SentimentLabel>& predicted) {
  if (gold.empty()) raise(Errc::EmptyInput, "no label pairs to count");
  if (gold.size() != predicted.size()) {
    raise(Errc::LengthMismatch, std::to_string(gold.size()) + " gold vs " +
                                    std::to_string(predicted.size()) +
                                    " predicted labels");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    m.counts[static_cast<int>(gold[i])][static_cast<int>(predicted[i])] += 1;
  }
  return m;
}

EvalReport report(const ConfusionMatrix& matrix) {
  EvalReport rep;
  rep.matrix = matrix;
  rep.total = matrix.total();
  if (rep.total == 0) raise(Errc::EmptyMatrix, "confusion matrix has no counts");

  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    trace += matrix.counts[c][c];
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      row += matrix.counts[c][j];
      col += matrix.counts[j][c];
    }
    const double diag = static_cast<double>(matrix.counts[c][c]);
    ClassMetrics& cm = rep.per_class[c];
    cm.recall = row ? diag / static_cast<double>(row) : 0.0;
    cm.precision = col ? diag / static_cast<double>(col) : 0.0;
    cm.f1 = (cm.precision + cm.recall) > 0.0
                ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                : 0.0;
  }
  rep.accuracy = static_cast<double>(trace) / static_cast<double>(rep.total);
  rep.avg_recall = (rep.per_class[0].recall + rep.per_class[1].recall +
                    rep.per_class[2].recall) / 3.0;
  rep.f1_pn = (rep.per_class[0].f1 + rep.per_class[1].f1) / 2.0;
  rep.macro_f1 = (rep.per_class[0].f1 + rep.per_class[1].f1 +
                  rep.per_class[2].f1) / 3.0;
  return rep;
}

EvalReport evaluate(const EnsembleModel& model, const Dataset& dataset) {
  if (dataset.empty()) raise(Errc::EmptyInput, "no documents to evaluate");
  std::vector<SentimentLabel> gold, predicted;
  gold.reserve(dataset.size());
  predicted.reserve(dataset.size());
  for (const auto& ex : dataset) {
    gold.push_back(ex.label);
    predicted.push_back(model.predict_label(ex.doc));
  }
  return report(confusion(gold, predicted));
}

namespace {

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

}  // namespace

std::string format_report_text(const EvalReport& rep) {
  std::ostringstream out;
  out << "confusion matrix (rows gold, columns predicted)\n";
  out << "            ";
  for (auto label : kAllLabels) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%10s", std::string(to_string(label)).c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t g = 0; g < kNumClasses; ++g) {
    char head[16];
    std::snprintf(head, sizeof head, "%12s",
                  std::string(to_string(kAllLabels[g])).c_str());
    out << head;
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      char cell[16];
      std::snprintf(cell, sizeof cell, "%10llu",
                    static_cast<unsigned long long>(rep.matrix.counts[g][p]));
      out << cell;
    }
    out << '\n';
  }
  out << '\n';
  out << "class        precision    recall        f1\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    char line[80];
    std::snprintf(line, sizeof line, "%-12s    %s    %s    %s\n",
                  std::string(to_string(kAllLabels[c])).c_str(),
                  fixed4(rep.per_class[c].precision).c_str(),
                  fixed4(rep.per_class[c].recall).c_str(),
                  fixed4(rep.per_class[c].f1).c_str());
    out << line;
  }
  out << '\n';
  out << "accuracy      " << fixed4(rep.accuracy) << '\n';
  out << "avg_recall    " << fixed4(rep.avg_recall) << '\n';
  out << "f1_pn         " << fixed4(rep.f1_pn) << '\n';
  out << "macro_f1      " << fixed4(rep.macro_f1) << '\n';
  out << "total         " << rep.total << '\n';
  return out.str();
}

std::string report_to_json(const EvalReport& rep) {
  // Flat metric-name -> value document; nlohmann::json objects iterate in
  // alphabetical key order, so the output is deterministic.
  nlohmann::json j;
  j["accuracy"] = rep.accuracy;
  j["avg_recall"] = rep.avg_recall;
  j["f1_pn"] = rep.f1_pn;
  j["macro_f1"] = rep.macro_f1;
  j["total"] = rep.total;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::string name(to_string(kAllLabels[c]));
    j["precision_" + name] = rep.per_class[c].precision;
    j["recall_" + name] = rep.per_class[c].recall;
    j["f1_" + name] = rep.per_class[c].f1;
  }
  for (std::size_t g = 0; g < kNumClasses; ++g) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      const std::string key = "confusion_" + std::string(to_string(kAllLabels[g])) +
                              "_" + std::string(to_string(kAllLabels[p]));
      j[key] = rep.matrix.counts[g][p];
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace mvsenti
