#include <cstdio>
#include <string>

#include <json.hpp>

#include "camkit/metrics.hpp"

namespace camkit {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json class_row(const ClassRow& row) {
  return {{"class", to_string(row.label)},
          {"precision", row.precision},
          {"recall", row.recall},
          {"specificity", row.specificity}};
}

std::string fixed(const std::optional<double>& v, int digits) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string report_json(const MetricsReport& r, std::string_view model_name) {
  ordered_json doc;
  if (!model_name.empty()) doc["model"] = model_name;
  doc["records"] = r.records;
  doc["positives"] = r.positives;
  doc["negatives"] = r.negatives;
  doc["threshold"] = r.threshold;
  doc["confusion"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn}};
  doc["accuracy"] = r.summary.accuracy;
  doc["precision"] = r.summary.precision;
  doc["recall"] = r.summary.recall;
  doc["specificity"] = r.summary.specificity;
  doc["f1"] = r.summary.f1;
  doc["roc_auc"] = optional_number(r.roc_auc);
  doc["pr_auc"] = optional_number(r.pr_auc);
  doc["best_f1"] = r.best_f1 ? ordered_json(r.best_f1->f1) : ordered_json(nullptr);
  doc["best_threshold"] = r.best_f1 ? ordered_json(r.best_f1->threshold) : ordered_json(nullptr);
  doc["per_class"] = ordered_json::array({class_row(r.per_class.normal), class_row(r.per_class.pneumonia)});
  doc["zero_division"] = r.summary.zero_division;
  doc["undefined"] = r.undefined;
  return doc.dump(2) + "\n";
}

std::string report_table(const MetricsReport& r, std::string_view model_name) {
  const std::string model = model_name.empty() ? "-" : std::string(model_name);
  const std::size_t w0 = std::max<std::size_t>(model.size() + 2, 8);
  std::optional<double> best;
  if (r.best_f1) best = r.best_f1->f1;

  std::string out;
  out += pad("Model", w0) + pad("Acc", 10) + pad("ROC-AUC", 9) + pad("PR-AUC", 9) + pad("Best F1", 9) + "Threshold\n";
  out += pad(model, w0) + pad(percent(r.summary.accuracy), 10) + pad(fixed(r.roc_auc, 4), 9) +
         pad(fixed(r.pr_auc, 4), 9) + pad(fixed(best, 3), 9) +
         fixed(r.best_f1 ? std::optional<double>(r.best_f1->threshold) : std::nullopt, 4) + "\n\n";

  out += pad("Model", w0) + pad("Class", 11) + pad("Precision", 11) + pad("Recall", 9) + "Specificity\n";
  const ClassRow* rows[] = {&r.per_class.normal, &r.per_class.pneumonia};
  const char* names[] = {"Normal", "Pneumonia"};
  for (int i = 0; i < 2; ++i) {
    out += pad(i == 0 ? model : "", w0) + pad(names[i], 11) + pad(fixed(rows[i]->precision, 4), 11) +
           pad(fixed(rows[i]->recall, 4), 9) + fixed(rows[i]->specificity, 4) + "\n";
  }
  return out;
}

}  // namespace camkit
