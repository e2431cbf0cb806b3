#include <regex>

#include <json.hpp>

#include "camkit/csv.hpp"
#include "camkit/error.hpp"
#include "camkit/io.hpp"
#include "camkit/splitter.hpp"

namespace camkit {

namespace {

std::regex compile_pattern(std::string_view pattern) {
  try {
    return std::regex(std::string(pattern));
  } catch (const std::regex_error& e) {
    throw ValidationError("bad patient-id pattern '" + std::string(pattern) + "': " + e.what());
  }
}

std::string extract_patient(std::string_view image_path, const std::regex& re) {
  const auto slash = image_path.find_last_of("/\\");
  const std::string name(slash == std::string_view::npos ? image_path : image_path.substr(slash + 1));
  std::smatch m;
  if (!std::regex_search(name, m, re)) {
    throw ValidationError("cannot derive a patient id from '" + name + "'");
  }
  auto id = m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
  if (id.empty()) throw ValidationError("patient-id pattern matched nothing in '" + name + "'");
  return id;
}

}  // namespace

std::string patient_id_from_filename(std::string_view image_path, std::string_view pattern) {
  return extract_patient(image_path, compile_pattern(pattern));
}

Manifest parse_manifest(std::string_view text, std::string_view pattern) {
  const auto table = parse_csv(text);
  const auto path_col = table.require_column("image_path");
  const auto label_col = table.require_column("label");
  const auto patient_col = table.column("patient_id");
  const auto subset_col = table.column("subset");

  std::optional<std::regex> re;
  Manifest m;
  if (subset_col) m.subsets.emplace();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    try {
      DatasetRecord rec;
      rec.image_path = row[path_col];
      if (rec.image_path.empty()) throw ValidationError("empty image_path");
      rec.label = parse_label(row[label_col]);
      rec.patient_id = patient_col ? row[*patient_col] : std::string();
      if (rec.patient_id.empty()) {
        if (!re) re = compile_pattern(pattern);
        rec.patient_id = extract_patient(rec.image_path, *re);
      }
      m.records.push_back(std::move(rec));
      if (subset_col) m.subsets->push_back(row[*subset_col]);
    } catch (const ValidationError& e) {
      throw ValidationError("manifest line " + std::to_string(table.lines[r]) + ": " + e.what());
    }
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path, std::string_view pattern) {
  return parse_manifest(read_text(path), pattern);
}

std::string format_split_manifest(std::span<const SplitRecord> records) {
  std::string out = "image_path,patient_id,label,subset\n";
  for (const auto& r : records) {
    out += csv_field(r.record.image_path) + ',' + csv_field(r.record.patient_id) + ',' +
           std::string(to_string(r.record.label)) + ',' + csv_field(r.subset) + '\n';
  }
  return out;
}

std::string format_oversample_plan(std::span<const DatasetRecord> train_records,
                                   const OversamplePlan& plan) {
  std::string out = "order,index,image_path,patient_id,label\n";
  for (std::size_t k = 0; k < plan.indices.size(); ++k) {
    const auto i = plan.indices[k];
    const auto& rec = train_records[i];
    out += std::to_string(k) + ',' + std::to_string(i) + ',' + csv_field(rec.image_path) + ',' +
           csv_field(rec.patient_id) + ',' + std::string(to_string(rec.label)) + '\n';
  }
  return out;
}

std::string audit_json(std::span<const LeakViolation> violations) {
  nlohmann::ordered_json doc;
  doc["leak_free"] = violations.empty();
  doc["violation_count"] = violations.size();
  auto list = nlohmann::ordered_json::array();
  for (const auto& v : violations) list.push_back({{"patient_id", v.patient_id}, {"subsets", v.subsets}});
  doc["violations"] = std::move(list);
  return doc.dump(2) + "\n";
}

}  // namespace camkit
