#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "camkit/label.hpp"

namespace camkit {

struct DatasetRecord {
  std::string image_path;
  std::string patient_id;
  Label label = Label::normal;
};

enum class Subset : std::uint8_t { train, val, test };

std::string_view to_string(Subset s) noexcept;
Subset parse_subset(std::string_view text);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

// patient_id -> subset. Every patient belongs to exactly one subset.
struct SplitAssignment {
  std::map<std::string, Subset> subset_of;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  bool stratified = false;

  Subset at(const std::string& patient_id) const;
  std::size_t patients_in(Subset s) const;
};

// Groups records by patient, sorts patient ids, shuffles them with
// Xorshift64Star(seed) and cuts the list at round(train*n) and
// round((train+val)*n), nudged so no subset is empty. In stratified mode
// each patient takes the majority label of its images (ties: PNEUMONIA)
// and each stratum is cut separately.
SplitAssignment patient_split(std::span<const DatasetRecord> records, SplitRatios ratios,
                              std::uint64_t seed, bool stratified = false);

// A record tagged with the subset it was placed in. The subset is free text
// so manifests from other tools (e.g. "train"/"test" folders) can be audited.
struct SplitRecord {
  DatasetRecord record;
  std::string subset;
};

std::vector<SplitRecord> apply_split(std::span<const DatasetRecord> records,
                                     const SplitAssignment& assignment);

struct LeakViolation {
  std::string patient_id;
  std::vector<std::string> subsets;  // sorted, size >= 2

  friend bool operator==(const LeakViolation&, const LeakViolation&) = default;
};

// Patients present in more than one subset, ordered by patient id.
std::vector<LeakViolation> audit_leakage(std::span<const SplitRecord> records);

struct NamedManifest {
  std::string name;
  std::vector<DatasetRecord> records;
};

// Each manifest is treated as one subset named after it.
std::vector<LeakViolation> audit_leakage(std::span<const NamedManifest> manifests);

struct OversamplePlan {
  std::vector<std::size_t> indices;
};

// Keeps every index once, tops the minority class up with seeded draws
// (with replacement) to the majority count, then shuffles. Length is
// 2 x majority count.
OversamplePlan oversample_plan(std::span<const DatasetRecord> train_records, std::uint64_t seed);

// Default rule for Kermany-style file names: person123_bacteria_4.jpeg ->
// person123, IM-0115-0001.jpeg -> IM-0115, NORMAL2-IM-1427-0001.jpeg ->
// NORMAL2-IM-1427.
inline constexpr std::string_view kKermanyPatientPattern =
    R"(^(person\d+|NORMAL2-IM-\d+|IM-\d+))";

// First capture group of `pattern` matched against the file name (not the
// directory). Throws ValidationError when nothing matches.
std::string patient_id_from_filename(std::string_view image_path,
                                     std::string_view pattern = kKermanyPatientPattern);

// CSV image_path,patient_id,label[,subset]. Empty patient_id cells are
// filled from the file name with `pattern`.
struct Manifest {
  std::vector<DatasetRecord> records;
  std::optional<std::vector<std::string>> subsets;
};

Manifest parse_manifest(std::string_view csv, std::string_view pattern = kKermanyPatientPattern);
Manifest read_manifest(const std::filesystem::path& path,
                       std::string_view pattern = kKermanyPatientPattern);

std::string format_split_manifest(std::span<const SplitRecord> records);
std::string format_oversample_plan(std::span<const DatasetRecord> train_records,
                                   const OversamplePlan& plan);
std::string audit_json(std::span<const LeakViolation> violations);

}  // namespace camkit
