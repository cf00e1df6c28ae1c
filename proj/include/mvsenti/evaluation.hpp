#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mvsenti/corpus.hpp"
#include "mvsenti/ensemble.hpp"

namespace mvsenti {

/// counts[gold][predicted], both in canonical class order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
};

ConfusionMatrix confusion(const std::vector<SentimentLabel>& gold,
                          const std::vector<SentimentLabel>& predicted);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  ConfusionMatrix matrix;
  std::array<ClassMetrics, kNumClasses> per_class;
  double accuracy = 0.0;
  double avg_recall = 0.0;   // mean recall over the three classes
  double f1_pn = 0.0;        // mean F1 of positive and negative
  double macro_f1 = 0.0;     // mean F1 over the three classes
  std::uint64_t total = 0;
};

/// Derives every metric from a confusion matrix. Empty denominators score
/// zero rather than dividing by zero; an all-zero matrix is an error.
EvalReport report(const ConfusionMatrix& matrix);

EvalReport evaluate(const EnsembleModel& model, const Dataset& dataset);

/// Human-readable report, four decimals per metric.
std::string format_report_text(const EvalReport& rep);

/// The same report as a JSON document (indented, trailing newline).
std::string report_to_json(const EvalReport& rep);

}  // namespace mvsenti
