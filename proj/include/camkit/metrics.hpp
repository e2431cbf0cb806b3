#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "camkit/label.hpp"

namespace camkit {

// One scored image. score is the positive-class (PNEUMONIA) probability.
struct PredictionRecord {
  std::string id;
  std::string patient_id;
  Label label = Label::normal;
  double score = 0.0;
};

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Threshold metrics. A ratio with a zero denominator is reported as 0 and
// its name is listed in zero_division.
struct Summary {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  std::vector<std::string> zero_division;
};

struct ClassRow {
  Label label = Label::normal;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
};

// Two rows: PNEUMONIA as the positive class, and NORMAL with the labels
// swapped.
struct PerClassReport {
  ClassRow normal;
  ClassRow pneumonia;
};

struct BestF1 {
  double f1 = 0.0;
  double threshold = 0.0;
};

struct MetricsReport {
  std::size_t records = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double threshold = 0.5;
  ConfusionCounts counts;
  Summary summary;
  std::optional<double> roc_auc;
  std::optional<double> pr_auc;
  std::optional<BestF1> best_f1;
  PerClassReport per_class;
  // Names of metrics that are undefined for this label mix.
  std::vector<std::string> undefined;
};

// Non-empty, unique ids, scores in [0,1]. Throws ValidationError.
void validate(std::span<const PredictionRecord> records);

// Predicted positive iff score >= threshold.
ConfusionCounts confusion_at_threshold(std::span<const PredictionRecord> records, double threshold);

Summary summary_from_counts(const ConfusionCounts& counts);

// Mann-Whitney statistic with 0.5 credit for tied pairs. O(n log n).
// Throws UndefinedMetric unless both classes are present.
double roc_auc(std::span<const PredictionRecord> records);

// Step-wise average precision, thresholds at the distinct scores.
// Throws UndefinedMetric when there is no positive record.
double pr_auc(std::span<const PredictionRecord> records);

// Max F1 over the distinct scores plus a sentinel above the maximum; ties
// resolve to the smallest threshold.
BestF1 best_f1(std::span<const PredictionRecord> records);

PerClassReport per_class_report(std::span<const PredictionRecord> records, double threshold);

MetricsReport evaluate(std::span<const PredictionRecord> records, double threshold = 0.5);

// CSV with header id,patient_id,label,score.
std::vector<PredictionRecord> parse_predictions(std::string_view csv);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
std::string format_predictions(std::span<const PredictionRecord> records);

std::string report_json(const MetricsReport& report, std::string_view model_name = {});
// Aligned text: an overall row (Accuracy, ROC-AUC, PR-AUC, F1) followed by
// per-class Precision / Recall / Specificity rows.
std::string report_table(const MetricsReport& report, std::string_view model_name = {});

}  // namespace camkit
