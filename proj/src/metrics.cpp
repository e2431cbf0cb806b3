#include "camkit/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "camkit/csv.hpp"
#include "camkit/error.hpp"
#include "camkit/io.hpp"

namespace camkit {

namespace {

struct Scored {
  double score;
  bool positive;
};

std::vector<Scored> scored(std::span<const PredictionRecord> records) {
  std::vector<Scored> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.score, r.label == Label::pneumonia});
  return out;
}

std::size_t count_positive(std::span<const Scored> s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](const Scored& x) { return x.positive; }));
}

double ratio(std::size_t num, std::size_t den, const char* name, std::vector<std::string>& zero_division) {
  if (den == 0) {
    zero_division.emplace_back(name);
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

void require_nonempty(std::span<const PredictionRecord> records) {
  if (records.empty()) throw ValidationError("no prediction records");
}

// Cumulative counts after each group of tied scores, highest score first.
// tp/fp at entry i are the counts for threshold = groups[i].score.
struct Step {
  double score;
  std::size_t tp;
  std::size_t fp;
};

std::vector<Step> descending_steps(std::span<const PredictionRecord> records) {
  auto s = scored(records);
  std::sort(s.begin(), s.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  std::vector<Step> steps;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < s.size();) {
    const double score = s[i].score;
    for (; i < s.size() && s[i].score == score; ++i) {
      if (s[i].positive) {
        ++tp;
      } else {
        ++fp;
      }
    }
    steps.push_back({score, tp, fp});
  }
  return steps;
}

}  // namespace

void validate(std::span<const PredictionRecord> records) {
  require_nonempty(records);
  std::unordered_set<std::string_view> ids;
  for (const auto& r : records) {
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      throw ValidationError("record '" + r.id + "': score must lie in [0,1]");
    }
    if (r.label != Label::normal && r.label != Label::pneumonia) {
      throw ValidationError("record '" + r.id + "': invalid label");
    }
    if (!ids.insert(r.id).second) throw ValidationError("duplicate record id '" + r.id + "'");
  }
}

ConfusionCounts confusion_at_threshold(std::span<const PredictionRecord> records, double threshold) {
  require_nonempty(records);
  ConfusionCounts c;
  for (const auto& r : records) {
    const bool predicted = r.score >= threshold;
    const bool actual = r.label == Label::pneumonia;
    if (predicted && actual) {
      ++c.tp;
    } else if (predicted) {
      ++c.fp;
    } else if (actual) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

Summary summary_from_counts(const ConfusionCounts& c) {
  if (c.total() == 0) throw ValidationError("confusion counts are all zero");
  Summary s;
  s.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  s.precision = ratio(c.tp, c.tp + c.fp, "precision", s.zero_division);
  s.recall = ratio(c.tp, c.tp + c.fn, "recall", s.zero_division);
  s.specificity = ratio(c.tn, c.tn + c.fp, "specificity", s.zero_division);
  // 2PR/(P+R) with both denominators cleared: 2tp / (2tp + fp + fn). It is
  // flagged whenever precision or recall was itself 0/0.
  const std::size_t f1_den = 2 * c.tp + c.fp + c.fn;
  s.f1 = f1_den == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(f1_den);
  if (c.tp + c.fp == 0 || c.tp + c.fn == 0) s.zero_division.emplace_back("f1");
  return s;
}

double roc_auc(std::span<const PredictionRecord> records) {
  require_nonempty(records);
  auto s = scored(records);
  const std::size_t positives = count_positive(s);
  const std::size_t negatives = s.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetric("ROC-AUC needs both positive and negative records");
  }
  std::sort(s.begin(), s.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });

  // Twice the Mann-Whitney U: each (pos, neg) pair scores 2 for a win and
  // 1 for a tie, so the sum stays an exact integer.
  unsigned long long twice_wins = 0;
  std::size_t negatives_below = 0;
  for (std::size_t i = 0; i < s.size();) {
    const double score = s[i].score;
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (; i < s.size() && s[i].score == score; ++i) {
      if (s[i].positive) {
        ++pos;
      } else {
        ++neg;
      }
    }
    twice_wins += 2ULL * pos * negatives_below + 1ULL * pos * neg;
    negatives_below += neg;
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double pr_auc(std::span<const PredictionRecord> records) {
  require_nonempty(records);
  const auto steps = descending_steps(records);
  const std::size_t positives = steps.back().tp;
  if (positives == 0) throw UndefinedMetric("PR-AUC needs at least one positive record");

  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& st : steps) {
    const double recall = static_cast<double>(st.tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(st.tp) / static_cast<double>(st.tp + st.fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

BestF1 best_f1(std::span<const PredictionRecord> records) {
  require_nonempty(records);
  const auto steps = descending_steps(records);
  const std::size_t positives = steps.back().tp;
  if (positives == 0) throw UndefinedMetric("best F1 needs at least one positive record");

  auto f1_at = [positives](std::size_t tp, std::size_t fp) {
    const std::size_t fn = positives - tp;
    return static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
  };
  // Sentinel above every score: nothing predicted positive.
  BestF1 best{f1_at(0, 0), std::nextafter(steps.front().score, INFINITY)};
  for (const auto& st : steps) {
    const double f1 = f1_at(st.tp, st.fp);
    if (f1 >= best.f1) best = {f1, st.score};
  }
  return best;
}

PerClassReport per_class_report(std::span<const PredictionRecord> records, double threshold) {
  const auto c = confusion_at_threshold(records, threshold);
  const auto pneumonia = summary_from_counts(c);
  const auto normal = summary_from_counts({.tp = c.tn, .fp = c.fn, .fn = c.fp, .tn = c.tp});
  return {
      .normal = {Label::normal, normal.precision, normal.recall, normal.specificity},
      .pneumonia = {Label::pneumonia, pneumonia.precision, pneumonia.recall, pneumonia.specificity},
  };
}

MetricsReport evaluate(std::span<const PredictionRecord> records, double threshold) {
  validate(records);
  MetricsReport rep;
  rep.records = records.size();
  rep.threshold = threshold;
  rep.counts = confusion_at_threshold(records, threshold);
  rep.positives = rep.counts.tp + rep.counts.fn;
  rep.negatives = rep.counts.fp + rep.counts.tn;
  rep.summary = summary_from_counts(rep.counts);
  rep.per_class = per_class_report(records, threshold);
  if (rep.positives > 0 && rep.negatives > 0) {
    rep.roc_auc = roc_auc(records);
  } else {
    rep.undefined.emplace_back("roc_auc");
  }
  if (rep.positives > 0) {
    rep.pr_auc = pr_auc(records);
    rep.best_f1 = best_f1(records);
  } else {
    rep.undefined.emplace_back("pr_auc");
    rep.undefined.emplace_back("best_f1");
  }
  return rep;
}

std::vector<PredictionRecord> parse_predictions(std::string_view text) {
  const auto table = parse_csv(text);
  const auto id_col = table.require_column("id");
  const auto patient_col = table.require_column("patient_id");
  const auto label_col = table.require_column("label");
  const auto score_col = table.require_column("score");

  std::vector<PredictionRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = "predictions line " + std::to_string(table.lines[r]) + ": ";
    PredictionRecord rec;
    rec.id = row[id_col];
    rec.patient_id = row[patient_col];
    if (rec.id.empty()) throw ValidationError(where + "empty id");
    try {
      rec.label = parse_label(row[label_col]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    const auto& s = row[score_col];
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), rec.score);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(rec.score)) {
      throw ValidationError(where + "bad score '" + s + "'");
    }
    out.push_back(std::move(rec));
  }
  validate(out);
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_text(path));
}

std::string format_predictions(std::span<const PredictionRecord> records) {
  std::string out = "id,patient_id,label,score\n";
  char buf[64];
  for (const auto& r : records) {
    const auto res = std::to_chars(buf, buf + sizeof buf, r.score);
    out += csv_field(r.id) + ',' + csv_field(r.patient_id) + ',' + std::to_string(to_int(r.label)) +
           ',' + std::string(buf, res.ptr) + '\n';
  }
  return out;
}

}  // namespace camkit
