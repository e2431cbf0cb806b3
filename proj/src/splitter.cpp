#include "camkit/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "camkit/error.hpp"
#include "camkit/rng.hpp"

namespace camkit {

std::string_view to_string(Subset s) noexcept {
  switch (s) {
    case Subset::train: return "train";
    case Subset::val: return "val";
    case Subset::test: return "test";
  }
  return "train";
}

Subset parse_subset(std::string_view text) {
  if (text == "train") return Subset::train;
  if (text == "val") return Subset::val;
  if (text == "test") return Subset::test;
  throw ValidationError("unknown subset '" + std::string(text) + "'");
}

Subset SplitAssignment::at(const std::string& patient_id) const {
  auto it = subset_of.find(patient_id);
  if (it == subset_of.end()) throw ValidationError("patient '" + patient_id + "' is not in the split");
  return it->second;
}

std::size_t SplitAssignment::patients_in(Subset s) const {
  return static_cast<std::size_t>(std::count_if(subset_of.begin(), subset_of.end(),
                                                [s](const auto& kv) { return kv.second == s; }));
}

namespace {

void validate(const SplitRatios& r) {
  for (double v : {r.train, r.val, r.test}) {
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError("split ratios must be finite and > 0");
  }
  if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }
}

// With fill_all each subset gets at least one patient (needs n >= 3).
void assign_cut(std::span<const std::string> patients, const SplitRatios& r, bool fill_all,
                std::map<std::string, Subset>& out) {
  const std::size_t n = patients.size();
  const auto nd = static_cast<double>(n);
  auto train_end = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(r.train * nd)));
  auto val_end = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround((r.train + r.val) * nd)),
                                         train_end, n);
  if (fill_all) {
    train_end = std::clamp<std::size_t>(train_end, 1, n - 2);
    val_end = std::clamp<std::size_t>(val_end, train_end + 1, n - 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[patients[i]] = i < train_end ? Subset::train : (i < val_end ? Subset::val : Subset::test);
  }
}

}  // namespace

SplitAssignment patient_split(std::span<const DatasetRecord> records, SplitRatios ratios,
                              std::uint64_t seed, bool stratified) {
  validate(ratios);
  // patient -> (normal images, pneumonia images); std::map keeps ids sorted.
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_patient;
  for (const auto& rec : records) {
    if (rec.patient_id.empty()) throw ValidationError("record '" + rec.image_path + "' has no patient id");
    auto& counts = by_patient[rec.patient_id];
    (rec.label == Label::normal ? counts.first : counts.second)++;
  }
  if (by_patient.size() < 3) {
    throw ValidationError("need at least 3 distinct patients to fill 3 subsets, got " +
                          std::to_string(by_patient.size()));
  }

  SplitAssignment out;
  out.seed = seed;
  out.ratios = ratios;
  out.stratified = stratified;
  Xorshift64Star rng(seed);

  if (!stratified) {
    std::vector<std::string> patients;
    patients.reserve(by_patient.size());
    for (const auto& [id, counts] : by_patient) patients.push_back(id);
    shuffle(std::span(patients), rng);
    assign_cut(patients, ratios, true, out.subset_of);
    return out;
  }

  std::vector<std::string> normal;
  std::vector<std::string> pneumonia;
  for (const auto& [id, counts] : by_patient) {
    (counts.first > counts.second ? normal : pneumonia).push_back(id);
  }
  for (auto* stratum : {&normal, &pneumonia}) {
    shuffle(std::span(*stratum), rng);
    assign_cut(*stratum, ratios, false, out.subset_of);
  }
  return out;
}

std::vector<SplitRecord> apply_split(std::span<const DatasetRecord> records,
                                     const SplitAssignment& assignment) {
  std::vector<SplitRecord> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    out.push_back({rec, std::string(to_string(assignment.at(rec.patient_id)))});
  }
  return out;
}

std::vector<LeakViolation> audit_leakage(std::span<const SplitRecord> records) {
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& r : records) seen[r.record.patient_id].insert(r.subset);
  std::vector<LeakViolation> out;
  for (auto& [patient, subsets] : seen) {
    if (subsets.size() > 1) out.push_back({patient, {subsets.begin(), subsets.end()}});
  }
  return out;
}

std::vector<LeakViolation> audit_leakage(std::span<const NamedManifest> manifests) {
  std::vector<SplitRecord> tagged;
  for (const auto& m : manifests) {
    for (const auto& rec : m.records) tagged.push_back({rec, m.name});
  }
  return audit_leakage(tagged);
}

OversamplePlan oversample_plan(std::span<const DatasetRecord> train_records, std::uint64_t seed) {
  std::vector<std::size_t> normal;
  std::vector<std::size_t> pneumonia;
  for (std::size_t i = 0; i < train_records.size(); ++i) {
    (train_records[i].label == Label::normal ? normal : pneumonia).push_back(i);
  }
  if (normal.empty() || pneumonia.empty()) {
    throw ValidationError("oversampling needs both classes in the training records");
  }
  const auto& minority = normal.size() < pneumonia.size() ? normal : pneumonia;
  const auto& majority = normal.size() < pneumonia.size() ? pneumonia : normal;

  Xorshift64Star rng(seed);
  OversamplePlan plan;
  plan.indices.reserve(2 * majority.size());
  for (std::size_t i = 0; i < train_records.size(); ++i) plan.indices.push_back(i);
  for (std::size_t k = minority.size(); k < majority.size(); ++k) {
    plan.indices.push_back(minority[static_cast<std::size_t>(rng.below(minority.size()))]);
  }
  shuffle(std::span(plan.indices), rng);
  return plan;
}

}  // namespace camkit
