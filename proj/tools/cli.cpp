#include "cli.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "camkit/error.hpp"
#include "camkit/focal.hpp"
#include "camkit/gradcam.hpp"
#include "camkit/io.hpp"
#include "camkit/metrics.hpp"
#include "camkit/render.hpp"
#include "camkit/splitter.hpp"
#include "camkit/tensor.hpp"

namespace camkit::cli {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = spdlog::stderr_logger_mt("camkit");
  logger->set_pattern("camkit: [%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("CAMKIT_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  logger->set_level(level);
  return logger;
}

spdlog::logger& log() {
  static auto logger = make_logger();
  return *logger;
}

GridShape parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || v == 0) {
      throw ValidationError("--target-size must look like HxW with positive integers, got '" + text + "'");
    }
    return v;
  };
  if (x == std::string::npos) number("");
  return {number(std::string_view(text).substr(0, x)), number(std::string_view(text).substr(x + 1))};
}

SplitRatios parse_ratios(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    double d = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), d);
    if (ec != std::errc{} || end != part.data() + part.size()) {
      throw ValidationError("--ratios must be three comma-separated numbers, got '" + text + "'");
    }
    v.push_back(d);
  }
  if (v.size() != 3) throw ValidationError("--ratios must be three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

// ---- cam ----

struct CamOptions {
  fs::path bundle;
  fs::path out;
  std::string target_size;
  double alpha = kDefaultOverlayAlpha;
  fs::path image;
  unsigned jobs = 0;
};

fs::path raw_cam_path(const fs::path& png) {
  fs::path p = png;
  p.replace_extension(".camt");
  return p;
}

void render_bundle(const fs::path& manifest, const fs::path& out_png, const CamOptions& opt,
                   const std::optional<GridShape>& target_size, const std::optional<Image>& given_base) {
  const auto bundle = load_bundle(manifest);
  const Cam cam = compute_cam(bundle);
  log().debug("{}: {} cam {}x{} from {}", manifest.string(), to_string(bundle.kind), cam.rows(), cam.cols(),
              bundle.model_name);

  std::optional<Image> base = given_base;
  if (!base && !bundle.image_path.empty()) {
    fs::path p = bundle.image_path;
    if (p.is_relative()) p = manifest.parent_path() / p;
    if (fs::exists(p)) {
      base = read_png(p);
    } else {
      log().warn("{}: image {} not found, writing heatmap only", manifest.string(), p.string());
    }
  }

  GridShape target = bundle.image_size;
  if (target_size) {
    target = *target_size;
  } else if (base) {
    target = {image_height(*base), image_width(*base)};
  }
  if (base && (image_height(*base) != target.height || image_width(*base) != target.width)) {
    throw ValidationError("base image is " + std::to_string(image_height(*base)) + "x" +
                          std::to_string(image_width(*base)) + " but the target size is " +
                          std::to_string(target.height) + "x" + std::to_string(target.width));
  }

  const Cam heat = upsample_bilinear(normalize_cam(cam), static_cast<Eigen::Index>(target.height),
                                     static_cast<Eigen::Index>(target.width));
  const RgbImage rgb = base ? overlay(*base, heat, opt.alpha) : colorize(heat);

  std::vector<float> raw_values(static_cast<std::size_t>(cam.size()));
  Eigen::Map<Array2<float>>(raw_values.data(), cam.rows(), cam.cols()) = cam.cast<float>();
  const Tensor raw_tensor({static_cast<std::size_t>(cam.rows()), static_cast<std::size_t>(cam.cols())},
                          std::move(raw_values));

  write_png(rgb, out_png);
  write_tensor(raw_tensor, raw_cam_path(out_png));
  log().info("wrote {}", out_png.string());
}

int run_cam(const CamOptions& opt) {
  std::optional<GridShape> target;
  if (!opt.target_size.empty()) target = parse_size(opt.target_size);
  if (!fs::exists(opt.bundle)) throw IoError("bundle path " + opt.bundle.string() + " does not exist");

  if (!fs::is_directory(opt.bundle)) {
    std::optional<Image> base;
    if (!opt.image.empty()) base = read_png(opt.image);
    render_bundle(opt.bundle, opt.out, opt, target, base);
    return kOk;
  }

  if (!opt.image.empty()) throw ValidationError("--image applies to a single bundle, not a directory");
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::directory_iterator(opt.bundle)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());
  if (manifests.empty()) throw ValidationError("no *.json bundle manifests in " + opt.bundle.string());
  if (fs::exists(opt.out) && !fs::is_directory(opt.out)) {
    throw ValidationError("--out must be a directory when --bundle is a directory");
  }
  fs::create_directories(opt.out);

  const unsigned jobs = std::clamp<unsigned>(opt.jobs ? opt.jobs : std::thread::hardware_concurrency(), 1,
                                             static_cast<unsigned>(manifests.size()));
  std::atomic<std::size_t> next{0};
  std::atomic<int> status{kOk};
  std::mutex report_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < manifests.size(); i = next++) {
      const auto& m = manifests[i];
      try {
        render_bundle(m, opt.out / (m.stem().string() + ".png"), opt, target, std::nullopt);
      } catch (const IoError& e) {
        std::lock_guard lock(report_mutex);
        log().error("{}: {}", m.string(), e.what());
        status = kIoError;
      } catch (const std::exception& e) {
        std::lock_guard lock(report_mutex);
        log().error("{}: {}", m.string(), e.what());
        int expected = kOk;
        status.compare_exchange_strong(expected, kValidationError);
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return status;
}

// ---- metrics ----

struct MetricsOptions {
  fs::path predictions;
  fs::path report;
  double threshold = 0.5;
  std::string model;
};

int run_metrics(const MetricsOptions& opt, std::ostream& out) {
  if (!std::isfinite(opt.threshold)) throw ValidationError("--threshold must be finite");
  const auto records = read_predictions(opt.predictions);
  const auto rep = evaluate(records, opt.threshold);
  for (const auto& name : rep.undefined) log().warn("{} is undefined for this label mix", name);
  for (const auto& name : rep.summary.zero_division) log().warn("{} had a zero denominator, reported as 0", name);
  write_text_atomic(opt.report, report_json(rep, opt.model));
  out << report_table(rep, opt.model);
  return kOk;
}

// ---- split / audit / oversample ----

struct SplitOptions {
  fs::path manifest;
  fs::path out;
  std::uint64_t seed = 0;
  std::string ratios = "0.7,0.15,0.15";
  bool stratified = false;
  std::string pattern{kKermanyPatientPattern};
};

int run_split(const SplitOptions& opt, std::ostream& out) {
  const auto ratios = parse_ratios(opt.ratios);
  const auto manifest = read_manifest(opt.manifest, opt.pattern);
  const auto assignment = patient_split(manifest.records, ratios, opt.seed, opt.stratified);
  const auto tagged = apply_split(manifest.records, assignment);
  write_text_atomic(opt.out, format_split_manifest(tagged));

  std::map<std::string, std::array<std::size_t, 2>> images;
  for (const auto& r : tagged) images[r.subset][to_int(r.record.label)]++;
  out << "Subset  Patients  NORMAL  PNEUMONIA\n";
  for (Subset s : {Subset::train, Subset::val, Subset::test}) {
    const auto name = std::string(to_string(s));
    char line[96];
    std::snprintf(line, sizeof line, "%-6s  %8zu  %6zu  %9zu\n", name.c_str(), assignment.patients_in(s),
                  images[name][0], images[name][1]);
    out << line;
  }
  out << "seed " << opt.seed << (opt.stratified ? " (stratified)" : "") << "\n";
  return kOk;
}

struct AuditOptions {
  std::vector<fs::path> manifests;
  fs::path report;
  std::string pattern{kKermanyPatientPattern};
};

int run_audit(const AuditOptions& opt, std::ostream& out) {
  // Rows are tagged with their subset column, or with the file stem when a
  // manifest has none (one file per subset).
  std::vector<SplitRecord> tagged;
  for (const auto& path : opt.manifests) {
    auto m = read_manifest(path, opt.pattern);
    if (!m.subsets && opt.manifests.size() == 1) {
      throw ValidationError("a single audited manifest needs a 'subset' column; pass one --manifest per subset otherwise");
    }
    for (std::size_t i = 0; i < m.records.size(); ++i) {
      tagged.push_back({m.records[i], m.subsets ? (*m.subsets)[i] : path.stem().string()});
    }
  }
  const auto violations = audit_leakage(tagged);
  const auto json = audit_json(violations);
  if (!opt.report.empty()) write_text_atomic(opt.report, json);
  out << json;
  if (!violations.empty()) {
    log().warn("{} patient(s) appear in more than one subset", violations.size());
    return kValidationError;
  }
  return kOk;
}

struct OversampleOptions {
  fs::path manifest;
  fs::path out;
  std::uint64_t seed = 0;
  std::string pattern{kKermanyPatientPattern};
};

int run_oversample(const OversampleOptions& opt, std::ostream& out) {
  auto m = read_manifest(opt.manifest, opt.pattern);
  std::vector<DatasetRecord> train;
  if (m.subsets) {
    for (std::size_t i = 0; i < m.records.size(); ++i) {
      if ((*m.subsets)[i] == "train") train.push_back(m.records[i]);
    }
  } else {
    train = std::move(m.records);
  }
  const auto plan = oversample_plan(train, opt.seed);
  write_text_atomic(opt.out, format_oversample_plan(train, plan));
  out << "training records " << train.size() << ", plan length " << plan.indices.size() << "\n";
  return kOk;
}

// ---- loss-check ----

struct LossCheckOptions {
  bool grid = false;
};

int run_loss_check(const LossCheckOptions& opt, std::ostream& out) {
  std::vector<double> zs;
  std::vector<double> gammas;
  std::vector<double> alphas;
  if (opt.grid) {
    for (int i = -20; i <= 20; ++i) zs.push_back(0.5 * i);
    gammas = {0.0, 1.0, 2.0, 5.0};
    alphas = {0.25, 0.5, 0.75};
  } else {
    zs = {-3.0, 0.0, 0.3, 3.0};
    gammas = {0.0, 2.0};
    alphas = {0.25};
  }

  constexpr double h = 1e-5;
  constexpr double grad_tol = 1e-6;
  constexpr double form_tol = 1e-9;
  std::size_t failures = 0;
  char line[192];
  std::snprintf(line, sizeof line, "%2s %6s %5s %5s %14s %14s %14s %14s %10s %s\n", "y", "z", "alpha", "gamma",
                "loss(p)", "loss(z)", "dL/dz", "fd dL/dz", "rel.err", "ok");
  out << line;
  for (int y : {0, 1}) {
    for (double a : alphas) {
      for (double g : gammas) {
        for (double z : zs) {
          const FocalParams params{a, g};
          const double logit_loss = focal_loss_logit(y, z, params);
          const double p = sigmoid(z);
          const double prob_loss = focal_loss(y, p, params);
          const double grad = focal_grad_logit(y, z, params);
          const double fd = (focal_loss_logit(y, z + h, params) - focal_loss_logit(y, z - h, params)) / (2 * h);
          const double rel = std::abs(grad - fd) / std::max(std::abs(grad), 1e-300);
          const double form_rel = std::abs(prob_loss - logit_loss) / std::max(std::abs(logit_loss), 1e-300);
          const bool ok = rel <= grad_tol && form_rel <= form_tol;
          if (!ok) ++failures;
          std::snprintf(line, sizeof line, "%2d %6.2f %5.2f %5.2f %14.6e %14.6e %14.6e %14.6e %10.2e %s\n", y, z, a,
                        g, prob_loss, logit_loss, grad, fd, rel, ok ? "yes" : "NO");
          out << line;
        }
      }
    }
  }
  out << (failures == 0 ? "all checks passed\n" : std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? kOk : kValidationError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"camkit: Grad-CAM localization, overlay rendering and classifier evaluation"};
  app.name(args.empty() ? "camkit" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  CamOptions cam_opt;
  auto* cam = app.add_subcommand("cam", "Compute a Grad-CAM heatmap overlay from a bundle manifest");
  cam->add_option("--bundle", cam_opt.bundle, "Bundle manifest (JSON) or a directory of them")->required();
  cam->add_option("--out", cam_opt.out, "Output PNG (or directory for a bundle directory)")->required();
  cam->add_option("--target-size", cam_opt.target_size, "Output size HxW");
  cam->add_option("--alpha", cam_opt.alpha, "Overlay opacity")->check(CLI::Range(0.0, 1.0));
  cam->add_option("--image", cam_opt.image, "Base image PNG (grayscale or RGB)");
  cam->add_option("--jobs", cam_opt.jobs, "Worker threads for a bundle directory");

  MetricsOptions met_opt;
  auto* met = app.add_subcommand("metrics", "Evaluate a predictions CSV");
  met->add_option("--predictions", met_opt.predictions, "CSV id,patient_id,label,score")->required();
  met->add_option("--threshold", met_opt.threshold, "Decision threshold (score >= t is positive)")
      ->check(CLI::Range(0.0, 1.0));
  met->add_option("--report", met_opt.report, "Output JSON report")->required();
  met->add_option("--model", met_opt.model, "Model name for the report");

  SplitOptions split_opt;
  auto* split = app.add_subcommand("split", "Patient-level train/val/test split");
  split->add_option("--manifest", split_opt.manifest, "CSV image_path,patient_id,label")->required();
  split->add_option("--seed", split_opt.seed, "Shuffle seed")->required();
  split->add_option("--ratios", split_opt.ratios, "train,val,test fractions");
  split->add_option("--out", split_opt.out, "Output split manifest CSV")->required();
  split->add_flag("--stratified", split_opt.stratified, "Split NORMAL- and PNEUMONIA-majority patients separately");
  split->add_option("--patient-pattern", split_opt.pattern, "Regex deriving patient ids from file names");

  AuditOptions audit_opt;
  auto* audit = app.add_subcommand("audit", "Report patients present in more than one subset");
  audit->add_option("--manifest", audit_opt.manifests, "Split manifest, or one manifest per subset")->required();
  audit->add_option("--report", audit_opt.report, "Also write the JSON report here");
  audit->add_option("--patient-pattern", audit_opt.pattern, "Regex deriving patient ids from file names");

  OversampleOptions over_opt;
  auto* over = app.add_subcommand("oversample", "Minority-class oversampling plan for the training subset");
  over->add_option("--manifest", over_opt.manifest, "Manifest CSV (train rows used when a subset column exists)")
      ->required();
  over->add_option("--seed", over_opt.seed, "Sampling seed")->required();
  over->add_option("--out", over_opt.out, "Output plan CSV")->required();
  over->add_option("--patient-pattern", over_opt.pattern, "Regex deriving patient ids from file names");

  LossCheckOptions loss_opt;
  auto* loss = app.add_subcommand("loss-check", "Focal loss value and gradient verification table");
  loss->add_flag("--grid", loss_opt.grid, "Run the full z/gamma/alpha/label grid");

  std::vector<char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"camkit"} : args;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << "\n\n" << app.help();
    return kValidationError;
  }

  try {
    if (*cam) return run_cam(cam_opt);
    if (*met) return run_metrics(met_opt, out);
    if (*split) return run_split(split_opt, out);
    if (*audit) return run_audit(audit_opt, out);
    if (*over) return run_oversample(over_opt, out);
    if (*loss) return run_loss_check(loss_opt, out);
  } catch (const IoError& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kValidationError;
  }
  err << app.help();
  return kValidationError;
}

int run(int argc, char** argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace camkit::cli
