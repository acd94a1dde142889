#pragma once

// genprobe command line: subcommand wiring, run.json provenance, experiment
// orchestration and report emission. Exit codes: 0 ok, 2 usage/spec error,
// 3 data error.

#include <zlib.h>
#include <png.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "genprobe/analysis.hpp"
#include "genprobe/core.hpp"
#include "genprobe/error.hpp"
#include "genprobe/featureval.hpp"
#include "genprobe/learner.hpp"
#include "genprobe/manifest.hpp"
#include "genprobe/mdl.hpp"
#include "genprobe/metrics.hpp"
#include "genprobe/mnist.hpp"
#include "genprobe/svg.hpp"
#include "genprobe/synth.hpp"

namespace genprobe::cli {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSeedEnv = "GENPROBE_SEED";

// ---------------------------------------------------------------- seeds

struct SeedChoice {
  std::uint64_t value = 0;
  std::string source;  // flag, env, config
};

inline std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::usage, origin + ": '" + text + "' is not an unsigned integer seed");
}

/// --seed beats GENPROBE_SEED beats the config file.
inline SeedChoice resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t config_seed) {
  if (flag) return {*flag, "flag"};
  if (const char* env = std::getenv(kSeedEnv); env && *env) return {parse_seed(env, kSeedEnv), "env"};
  return {config_seed, "config"};
}

// ---------------------------------------------------------------- provenance

struct Provenance {
  json record;

  Provenance(const std::vector<std::string>& args, std::string command) {
    record["tool"] = "genprobe";
    record["version"] = kVersion;
    record["command"] = std::move(command);
    record["argv"] = args;
    record["cwd"] = fs::current_path().string();
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    record["started_at"] = buf;
    record["libraries"] = {{"libpng", PNG_LIBPNG_VER_STRING},
                           {"zlib", ZLIB_VERSION},
                           {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                 std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                 std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                           {"cli11", CLI11_VERSION}};
#if defined(__VERSION__)
    record["compiler"] = __VERSION__;
#endif
  }

  void seed(const SeedChoice& s) {
    record["seed"] = s.value;
    record["seed_source"] = s.source;
  }
  void config(const json& c) { record["config"] = c; }
  void output(const fs::path& p) { record["outputs"].push_back(p.generic_string()); }

  void write(const fs::path& path) const { write_text_file(path, record.dump(2) + "\n"); }
};

/// run.json for a directory output, <file>.run.json for a file output.
inline fs::path provenance_path_for_dir(const fs::path& dir) { return dir / "run.json"; }
inline fs::path provenance_path_for_file(const fs::path& file) { return fs::path(file.string() + ".run.json"); }

// ---------------------------------------------------------------- histograms from manifests

/// Feature spec by name: the generator features, numeric from a bin width.
inline FeatureSpec feature_spec_named(const std::string& name, double bin_width) {
  const auto spec = standard_feature_spec(name, bin_width);
  require(spec.has_value(), ErrorCode::usage,
          "unknown feature '" + name + "' (known: red_proportion, size, loc_x, loc_y, count, combination)");
  return *spec;
}

inline bool is_combination(const std::string& feature) { return feature == "combination"; }

inline Axis axis_named(const std::string& feature, double bin_width) {
  return is_combination(feature) ? Axis::of(three_digit_space()) : Axis::of(feature_spec_named(feature, bin_width));
}

/// Normalized histogram of one manifest feature; null values are skipped.
inline Histogram manifest_histogram(const DatasetManifest& m, const std::string& feature, double bin_width,
                                    std::size_t* clipped = nullptr) {
  if (is_combination(feature)) {
    const auto space = three_digit_space();
    std::vector<std::int64_t> ids;
    for (const auto& r : m.records) {
      const auto it = r.features.values.find(feature);
      if (it == r.features.values.end() || is_null(it->second)) continue;
      require(std::holds_alternative<std::string>(it->second), ErrorCode::domain_mismatch,
              "combination values must be labels such as \"717\"");
      ids.push_back(space.parse_label(std::get<std::string>(it->second)));
    }
    require(!ids.empty(), ErrorCode::empty_sample, "no '" + feature + "' values in manifest");
    return histogram_from_ids(ids, Axis::of(space));
  }
  std::vector<FeatureValue> values;
  for (const auto& r : m.records) {
    const auto it = r.features.values.find(feature);
    if (it != r.features.values.end() && !is_null(it->second)) values.push_back(it->second);
  }
  require(!values.empty(), ErrorCode::empty_sample, "no '" + feature + "' values in manifest");
  auto sh = histogram_from_samples(values, feature_spec_named(feature, bin_width));
  if (clipped) *clipped = sh.clipped;
  return sh.histogram;
}

inline double manifest_mean(const DatasetManifest& m, const std::string& feature) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : m.records) {
    const auto it = r.features.values.find(feature);
    if (it == r.features.values.end()) continue;
    if (const auto v = numeric_value(it->second)) s += *v, ++n;
  }
  require(n > 0, ErrorCode::empty_sample, "no numeric '" + feature + "' values");
  return s / static_cast<double>(n);
}

// ---------------------------------------------------------------- impulse files

inline json impulse_to_json(const ImpulseResponse& ir, const std::string& feature) {
  json bins = json::array();
  for (const auto& b : ir.kernel.bins()) bins.push_back({b.id, b.mass});
  return {{"feature", feature},
          {"bin_width", ir.kernel.axis().width},
          {"source_mode", ir.source_mode},
          {"mode_shift", ir.mode_shift},
          {"kernel", bins}};
}

inline ImpulseResponse impulse_from_json(const json& j) {
  try {
    ImpulseResponse ir;
    ir.source_mode = j.at("source_mode").get<double>();
    ir.mode_shift = j.at("mode_shift").get<std::int64_t>();
    std::vector<Bin> bins;
    for (const auto& b : j.at("kernel")) bins.push_back({b.at(0).get<std::int64_t>(), b.at(1).get<double>()});
    ir.kernel = Histogram::normalized(Axis::lattice(j.at("bin_width").get<double>()), std::move(bins));
    ir.stats = genprobe::detail::kernel_stats(ir.kernel, ir.mode_shift, ir.kernel.axis().width);
    return ir;
  } catch (const json::exception& e) {
    fail(ErrorCode::spec_invalid, std::string("impulse file: ") + e.what());
  }
}

/// Accepts the impulse.json file or the directory `analyze impulse` wrote.
inline ImpulseResponse read_impulse(const fs::path& p) {
  return impulse_from_json(read_json_file(fs::is_directory(p) ? p / "impulse.json" : p));
}

// ---------------------------------------------------------------- three-digit datasets

/// {"support": ["717", ...]} or {"support_count": K, "support_seed": s},
/// plus "image_count" and "base_seed".
inline ThreeMnistSpec three_mnist_spec_from_json(const json& j) {
  require(j.is_object(), ErrorCode::spec_invalid, "mnist3 spec must be a JSON object");
  ThreeMnistSpec spec;
  try {
    spec.image_count = j.value("image_count", std::size_t{0});
    spec.base_seed = j.value("base_seed", std::uint64_t{0});
    if (j.contains("support")) {
      for (const auto& label : j.at("support")) spec.support.push_back(Combination::parse(label.get<std::string>()));
    } else {
      const auto count = j.at("support_count").get<std::int64_t>();
      for (auto id : sample_combinations(three_digit_space(), count, j.value("support_seed", spec.base_seed)))
        spec.support.push_back(Combination::from_id(id));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::spec_invalid, std::string("mnist3 spec: ") + e.what());
  }
  require(!spec.support.empty(), ErrorCode::empty_support, "mnist3 support is empty");
  return spec;
}

/// Labels-only plan of a three-digit dataset, matching the combination drawn
/// for each index by compose_three_mnist.
inline DatasetManifest plan_three_mnist(const ThreeMnistSpec& spec) {
  require(!spec.support.empty(), ErrorCode::empty_support, "three-digit support is empty");
  DatasetManifest m;
  m.records.resize(spec.image_count);
  for (std::size_t i = 0; i < spec.image_count; ++i) {
    Rng rng(item_seed(spec.base_seed, i));
    auto& rec = m.records[i];
    rec.file = "images/" + image_name(i);
    rec.seed = item_seed(spec.base_seed, i);
    rec.features.values["combination"] = spec.support[rng.below(spec.support.size())].label();
  }
  return m;
}

inline Image render_combination(const DigitSet& digits, const std::array<std::vector<std::size_t>, 10>& pools,
                                const std::string& label, std::uint64_t seed) {
  const auto c = Combination::parse(label);
  Rng rng(seed);
  std::array<std::size_t, 3> ex{};
  for (std::size_t pos = 0; pos < 3; ++pos) {
    const auto& pool = pools[static_cast<std::size_t>(c.digits[pos])];
    require(!pool.empty(), ErrorCode::empty_class_pool, "no exemplars for digit " + std::to_string(c.digits[pos]));
    ex[pos] = pool[rng.below(pool.size())];
  }
  return compose_digits(digits, ex);
}

// ---------------------------------------------------------------- rendering samples

struct RenderOptions {
  std::string generator;  // pie, dots, mnist3
  int image_size = 64;
  const DigitSet* digits = nullptr;
};

/// Writes one PNG per record (named by record.file) under `out`.
inline void render_manifest(const DatasetManifest& m, const fs::path& out, const RenderOptions& opt) {
  fs::create_directories(out / "images");
  if (opt.generator == "mnist3") {
    require(opt.digits != nullptr, ErrorCode::usage, "mnist3 rendering needs --mnist-images/--mnist-labels");
    const auto pools = opt.digits->pools();
    parallel_for(m.size(), [&](std::size_t i) {
      const auto& r = m.records[i];
      write_png(out / r.file, render_combination(*opt.digits, pools, std::get<std::string>(r.features.at("combination")),
                                                 r.seed.value_or(i)));
    });
    return;
  }
  const auto gen = generator_from_string(opt.generator);
  parallel_for(m.size(), [&](std::size_t i) {
    const auto& r = m.records[i];
    write_png(out / r.file, render_features(gen, r.features, mix64(r.seed.value_or(i)), opt.image_size));
  });
}

// ---------------------------------------------------------------- reports

/// key: value text, CSV with p/predicted/actual columns and an SVG overlay
/// per analysis directory.
struct HistogramColumns {
  std::vector<std::string> names;
  std::map<std::string, std::map<std::string, double>> by_bin;  // bin label -> column -> mass
};

inline std::map<std::string, double> read_histogram_csv_raw(const fs::path& p) {
  std::stringstream ss(read_text_file(p));
  std::string line;
  std::getline(ss, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "bin,mass", ErrorCode::io, p.string() + ": header must be 'bin,mass'");
  std::map<std::string, double> out;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    require(comma != std::string::npos, ErrorCode::io, p.string() + ": malformed line");
    try {
      out[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    } catch (const std::logic_error&) {
      fail(ErrorCode::io, p.string() + ": malformed mass '" + line + "'");
    }
  }
  return out;
}

inline double bin_coordinate(const std::string& label, std::size_t fallback) {
  try {
    std::size_t used = 0;
    const double v = std::stod(label, &used);
    if (used == label.size()) return v;
  } catch (const std::logic_error&) {
  }
  return static_cast<double>(fallback);
}

/// Reports every directory under `in` (itself included) that holds p.csv,
/// predicted.csv or actual.csv, plus metrics.json when present. Returns the
/// written paths. SVG failures become warnings on `warn`.
inline std::vector<fs::path> write_report(const fs::path& in, const fs::path& out, std::ostream& warn) {
  require(fs::is_directory(in), ErrorCode::io, in.string() + " is not a directory");
  fs::create_directories(out);
  std::vector<fs::path> dirs;
  auto consider = [&](const fs::path& d) {
    for (const char* n : {"p.csv", "predicted.csv", "actual.csv"})
      if (fs::exists(d / n)) {
        dirs.push_back(d);
        return;
      }
  };
  consider(in);
  for (const auto& e : fs::recursive_directory_iterator(in))
    if (e.is_directory() && !fs::equivalent(e.path(), out)) consider(e.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<fs::path> written;
  for (const auto& d : dirs) {
    std::string name = fs::relative(d, in).generic_string();
    if (name == ".") name = "report";
    std::replace(name.begin(), name.end(), '/', '_');
    std::vector<std::pair<std::string, std::map<std::string, double>>> cols;
    for (const char* n : {"p", "predicted", "actual"})
      if (fs::exists(d / (std::string(n) + ".csv"))) cols.emplace_back(n, read_histogram_csv_raw(d / (std::string(n) + ".csv")));
    std::map<double, std::string> bins;  // coordinate -> label
    std::size_t k = 0;
    for (const auto& [cn, col] : cols)
      for (const auto& [label, mass] : col) bins.emplace(bin_coordinate(label, k++), label);
    std::string csv = "bin";
    for (const auto& [cn, col] : cols) csv += "," + cn;
    csv += "\n";
    for (const auto& [x, label] : bins) {
      csv += label;
      for (const auto& [cn, col] : cols) {
        const auto it = col.find(label);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", it == col.end() ? 0.0 : it->second);
        csv += std::string(",") + buf;
      }
      csv += "\n";
    }
    const auto csv_path = out / (name + ".csv");
    write_text_file(csv_path, csv);
    written.push_back(csv_path);

    // plots come after the numbers and never fail the run
    try {
      std::vector<Series> series;
      for (const auto& [cn, col] : cols) {
        Series s{cn, cn == "p" ? SeriesStyle::bars : SeriesStyle::line, {}};
        for (const auto& [x, label] : bins) {
          const auto it = col.find(label);
          s.points.emplace_back(x, it == col.end() ? 0.0 : it->second);
        }
        series.push_back(std::move(s));
      }
      const auto svg_path = out / (name + ".svg");
      write_text_file(svg_path, render_svg(series, name));
      written.push_back(svg_path);
    } catch (const std::exception& e) {
      warn << "warning: plot for " << name << " skipped: " << e.what() << "\n";
    }
  }
  if (fs::exists(in / "metrics.json")) {
    const auto m = read_json_file(in / "metrics.json");
    std::string csv = "scope,metric,value\n";
    for (const auto& [scope, vals] : m.items()) {
      if (!vals.is_object()) continue;
      for (const auto& [k, v] : vals.items()) csv += scope + "," + k + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    }
    write_text_file(out / "metrics.csv", csv);
    written.push_back(out / "metrics.csv");
  }
  return written;
}

// ---------------------------------------------------------------- metrics

struct MetricInputs {
  Histogram p, q;
};

inline json metrics_json(const MetricsReport& r, const PrecisionRecall* pr) {
  const auto number = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
  json j = json::object();
  if (r.precision) j["precision"] = *r.precision;
  if (r.recall) j["recall"] = *r.recall;
  if (r.ce) j["ce_bits"] = r.ce->infinite ? json("inf") : number(r.ce->bits);
  if (r.emd) j["emd"] = number(*r.emd);
  if (r.auc) j["auc"] = *r.auc;
  if (pr) {
    j["precision_vacuous"] = pr->vacuous_precision;
    j["recall_vacuous"] = pr->vacuous_recall;
  }
  return j;
}

// ---------------------------------------------------------------- experiment

/// Experiment document (see schemas/experiment.schema.json):
///   train:        pie/dots dataset spec (object or path), or
///                 {"generator": "mnist3", ...three-digit spec}
///   learner:      "reference" or {"samples": dir-or-manifest} (external adapter)
///   learner_config: reference learner settings
///   impulse:      {"mode": {"feature": value}} single-mode training for the
///                 reference learner, or {"samples": ..., "mode": {...}}
///   features:     numeric features analyzed (predict + prototype)
///   metrics:      subset of pr, ce, emd, auc, marginals, on "combination"
///   sample_count, bin_width, alpha, prototype knobs, seed
struct ExperimentResult {
  json metrics = json::object();
  std::map<std::string, PrototypeReport> prototypes;
  std::map<std::string, double> tv_to_prediction;
  std::vector<fs::path> outputs;
};

inline json load_json_ref(const json& j, const fs::path& base) {
  if (j.is_string()) {
    fs::path p = j.get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_json_file(p);
  }
  return j;
}

inline DatasetManifest load_samples_ref(const json& j, const fs::path& base) {
  fs::path p = j.get<std::string>();
  if (p.is_relative()) p = base / p;
  return read_manifest(p);
}

inline DatasetManifest training_manifest(const json& train, json& echo) {
  echo = train;
  if (train.value("generator", std::string()) == "mnist3") return plan_three_mnist(three_mnist_spec_from_json(train));
  return plan_dataset(dataset_spec_from_json(train));
}

inline ExperimentResult run_experiment(const json& config_in, const fs::path& out, std::uint64_t seed,
                                       const fs::path& base, std::ostream& log) {
  require(config_in.is_object(), ErrorCode::spec_invalid, "experiment config must be a JSON object");
  ExperimentResult result;
  json config = config_in;
  fs::create_directories(out);
  try {
    const double bin_width = config.value("bin_width", 0.02);
    const std::size_t n = config.value("sample_count", std::size_t{10000});

    json train_json = load_json_ref(config.at("train"), base);
    if (!train_json.contains("base_seed")) train_json["base_seed"] = seed;
    json train_echo;
    const auto train = training_manifest(train_json, train_echo);
    config["train"] = train_echo;
    write_manifest(out / "train" / "manifest.jsonl", train);
    result.outputs.push_back(out / "train" / "manifest.jsonl");

    const json learner = config.value("learner", json("reference"));
    LearnerConfig lc = learner_config_from_json(config.value("learner_config", json::object()));
    const bool reference = learner.is_string() && learner.get<std::string>() == "reference";
    require(reference || (learner.is_object() && learner.contains("samples")), ErrorCode::spec_invalid,
            "learner must be \"reference\" or {\"samples\": path}");

    DatasetManifest samples;
    if (reference) {
      samples = sample(fit(train, lc), n, mix64(seed ^ 0x5a17u));
    } else {
      samples = load_samples_ref(learner.at("samples"), base);
    }
    write_manifest(out / "samples" / "manifest.jsonl", samples);
    result.outputs.push_back(out / "samples" / "manifest.jsonl");

    // single-feature analyses
    const auto features = config.value("features", std::vector<std::string>{});
    std::optional<DatasetManifest> impulse_samples;
    std::map<std::string, double> impulse_mode;
    if (config.contains("impulse")) {
      const auto& ij = config.at("impulse");
      for (const auto& [k, v] : ij.at("mode").items()) impulse_mode[k] = v.get<double>();
      if (ij.contains("samples")) {
        impulse_samples = load_samples_ref(ij.at("samples"), base);
      } else {
        require(reference, ErrorCode::spec_invalid, "impulse samples are needed for an external learner");
        DatasetManifest delta = train;
        for (auto& r : delta.records)
          for (const auto& [k, v] : impulse_mode) r.features.values[k] = v;
        impulse_samples = sample(fit(delta, lc), n, mix64(seed ^ 0x1e5u));
      }
    }
    PrototypeConfig pc;
    if (config.contains("prototype")) {
      const auto& pj = config.at("prototype");
      pc.window = pj.value("window", pc.window);
      pc.prominence = pj.value("prominence", pc.prominence);
      pc.delta_bins = pj.value("delta_bins", pc.delta_bins);
      pc.ratio_threshold = pj.value("ratio_threshold", pc.ratio_threshold);
    }
    for (const auto& f : features) {
      const auto dir = out / "analysis" / f;
      const auto p = manifest_histogram(train, f, bin_width);
      const auto actual = manifest_histogram(samples, f, bin_width);
      write_text_file(dir / "p.csv", to_csv(p));
      write_text_file(dir / "actual.csv", to_csv(actual));
      if (!impulse_samples) continue;
      require(impulse_mode.count(f) == 1, ErrorCode::spec_invalid, "impulse.mode lacks feature '" + f + "'");
      const auto ir = estimate_impulse_response(manifest_histogram(*impulse_samples, f, bin_width), impulse_mode[f]);
      const auto predicted = predict_response(p, ir);
      write_text_file(dir / "predicted.csv", to_csv(predicted));
      write_text_file(dir / "impulse.txt", to_text(ir));
      write_text_file(dir / "impulse.json", impulse_to_json(ir, f).dump(2) + "\n");
      auto cfg = pc;
      cfg.center = manifest_mean(train, f);
      const auto report = detect_prototype_enhancement(predicted, actual, cfg);
      write_text_file(dir / "prototype.txt", to_text(report));
      result.prototypes.emplace(f, report);
      const double tv = total_variation(actual, predicted);
      result.tv_to_prediction[f] = tv;
      result.metrics[f] = {{"tv_actual_vs_predicted", tv},
                           {"concentration_ratio", report.concentration_ratio},
                           {"predicted_modes", report.predicted_modes},
                           {"actual_modes", report.actual_modes},
                           {"enhanced", report.enhanced}};
      log << f << ": tv_actual_vs_predicted " << tv << ", enhanced " << (report.enhanced ? "true" : "false") << "\n";
    }

    // combination metrics
    const auto wanted = config.value("metrics", std::vector<std::string>{});
    if (!wanted.empty()) {
      const std::string mf = config.value("metric_feature", std::string("combination"));
      const auto p = manifest_histogram(train, mf, bin_width);
      const auto q = manifest_histogram(samples, mf, bin_width);
      MetricsReport mr;
      std::optional<PrecisionRecall> pr;
      const auto psupp = positive_support(p);
      for (const auto& w : wanted) {
        if (w == "pr") {
          pr = precision_recall(psupp, support_of(q, static_cast<std::int64_t>(psupp.members.size())));
          mr.precision = pr->precision;
          mr.recall = pr->recall;
        } else if (w == "ce") {
          mr.ce = cross_entropy(p, q, config.value("alpha", 1e-6));
        } else if (w == "emd") {
          mr.emd = emd(p, q, {is_combination(mf) ? GroundMetric::digit_l1 : GroundMetric::scalar_abs});
        } else if (w == "auc") {
          mr.auc = auc(psupp, q);
        } else if (w == "marginals") {
          require(is_combination(mf), ErrorCode::spec_invalid, "marginals need the combination feature");
          double worst = 0.0;
          for (std::size_t g = 0; g < 3; ++g) worst = std::max(worst, max_marginal_diff(marginal_preservation(p, q, g)));
          result.metrics["combination"]["max_marginal_diff"] = worst;
        } else {
          fail(ErrorCode::spec_invalid, "unknown metric '" + w + "'");
        }
      }
      const json values = metrics_json(mr, pr ? &*pr : nullptr);
      for (const auto& [k, v] : values.items()) result.metrics["combination"][k] = v;
      log << mr.to_kv();
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::spec_invalid, std::string("experiment config: ") + e.what());
  }
  write_text_file(out / "metrics.json", result.metrics.dump(2) + "\n");
  result.outputs.push_back(out / "metrics.json");
  write_text_file(out / "config.json", config.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------- entry point

inline int exit_code_for(const Error& e) { return is_usage_error(e.code()) ? 2 : 3; }

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

struct Options {
  std::string spec, outp, in, policy = "light", feature = "combination", p, q, impulse, labels, config, train;
  std::string mnist_images, mnist_labels, render, metric = "scalar_abs", runfile;
  std::vector<std::string> features, configs;
  std::optional<std::uint64_t> seed;
  std::optional<double> mode, g, center;
  double bin_width = 0.02, c = 10, d = 1, alpha = 0.0, prominence = 0.05, ratio = 1.2;
  int groups = 3, values = 10, window = 3, delta_bins = 2, image_size = 64, group = -1;
  std::size_t per_class = 0;
  std::optional<std::size_t> n;
  bool table = false, csv = false, force_flow = false;
};

inline DigitSet load_digits(const Options& o) {
  require(!o.mnist_images.empty() && !o.mnist_labels.empty(), ErrorCode::usage,
          "--mnist-images and --mnist-labels are required");
  auto d = DigitSet::load(o.mnist_images, o.mnist_labels);
  return o.per_class > 0 ? d.take_per_class(o.per_class) : d;
}

inline std::string fmt(double v) { return MetricsReport::format(v); }

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using detail::Options;
  Options o;
  CLI::App app{"genprobe: probe datasets, feature evaluation and generalization metrics for image generators"};
  app.name("genprobe");
  app.set_version_flag("--version", std::string("genprobe ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // --provenance may follow the subcommand
  std::string provenance_override;
  app.add_option("--provenance", provenance_override, "where to write run.json");

  std::function<void()> action;
  std::string command;
  auto bind = [&](CLI::App* sub, std::string name, std::function<void()> fn) {
    sub->callback([&, name, fn] {
      command = name;
      action = fn;
    });
  };

  // synth
  auto* synth = app.add_subcommand("synth", "generate a probe dataset");
  synth->require_subcommand(1);
  for (const std::string gen : {"pie", "dots"}) {
    auto* s = synth->add_subcommand(gen, "generate the " + gen + " dataset");
    s->add_option("--spec", o.spec, "dataset spec JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", o.outp, "output directory")->required();
    s->add_option("--seed", o.seed, "override the spec's base_seed");
    bind(s, "synth " + gen, [&, gen] {
      json sj = read_json_file(o.spec);
      require(sj.is_object(), ErrorCode::spec_invalid, "dataset spec must be a JSON object");
      if (!sj.contains("generator")) sj["generator"] = gen;
      require(sj["generator"] == gen, ErrorCode::usage, "spec generator differs from 'synth " + gen + "'");
      const auto seed = resolve_seed(o.seed, sj.value("base_seed", std::uint64_t{0}));
      sj["base_seed"] = seed.value;
      const auto spec = dataset_spec_from_json(sj);
      const auto m = generate_dataset(spec, o.outp);
      out << "wrote " << m.size() << " " << gen << " images to " << o.outp << "\n";
      Provenance prov(args, command);
      prov.seed(seed);
      prov.config(sj);
      prov.output(o.outp);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }
  {
    auto* s = synth->add_subcommand("mnist3", "compose three-digit MNIST images");
    s->add_option("--spec", o.spec, "three-digit spec JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", o.outp, "output directory")->required();
    s->add_option("--mnist-images", o.mnist_images, "IDX image file (optionally gzipped)")->required();
    s->add_option("--mnist-labels", o.mnist_labels, "IDX label file (optionally gzipped)")->required();
    s->add_option("--seed", o.seed, "override the spec's base_seed");
    bind(s, "synth mnist3", [&] {
      json sj = read_json_file(o.spec);
      require(sj.is_object(), ErrorCode::spec_invalid, "mnist3 spec must be a JSON object");
      const auto seed = resolve_seed(o.seed, sj.value("base_seed", std::uint64_t{0}));
      sj["base_seed"] = seed.value;
      const auto spec = three_mnist_spec_from_json(sj);
      const auto digits = detail::load_digits(o);
      const auto m = compose_three_mnist(spec, digits, fs::path(o.outp));
      out << "wrote " << m.size() << " three-digit images to " << o.outp << "\n";
      Provenance prov(args, command);
      prov.seed(seed);
      prov.config(sj);
      prov.output(o.outp);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }

  // eval
  {
    auto* s = app.add_subcommand("eval", "measure features of the images in a directory");
    s->add_option("--in", o.in, "sample directory")->required()->check(CLI::ExistingDirectory);
    s->add_option("--features", o.features, "comma-separated features")->delimiter(',')->required();
    s->add_option("--policy", o.policy, "background policy")->check(CLI::IsMember({"light", "dark"}));
    s->add_option("--out", o.outp, "evaluated manifest (JSON lines)")->required();
    s->add_option("--mnist-images", o.mnist_images, "reference digits for 'combination'");
    s->add_option("--mnist-labels", o.mnist_labels, "reference labels for 'combination'");
    s->add_option("--per-class", o.per_class, "use at most this many references per digit");
    bind(s, "eval", [&] {
      const auto policy = o.policy == "dark" ? BackgroundPolicy::dark() : BackgroundPolicy::light();
      std::optional<DigitSet> refs;
      std::vector<NamedEvaluator> evs;
      for (const auto& f : o.features) {
        if (is_combination(f)) {
          if (!refs) refs = detail::load_digits(o);
          const DigitSet* r = &*refs;
          evs.push_back({f, [r](const Image& img, const BackgroundPolicy&) {
                           return FeatureValue{classify_combination(img, *r).label()};
                         }});
        } else {
          evs.push_back({f, standard_evaluator(f)});
        }
      }
      const auto ev = eval_directory(o.in, evs, policy);
      write_manifest(o.outp, ev.manifest);
      const auto rejects = fs::path(o.outp).parent_path() / "rejects.json";
      write_text_file(rejects, ev.rejects_json().dump(2) + "\n");
      out << "evaluated " << ev.manifest.size() << " images, " << ev.rejected.size() << " rejected\n";
      Provenance prov(args, command);
      prov.config({{"features", o.features}, {"policy", o.policy}});
      prov.output(o.outp);
      prov.output(rejects);
      prov.write(provenance_override.empty() ? provenance_path_for_file(o.outp) : fs::path(provenance_override));
    });
  }

  // analyze
  auto* analyze = app.add_subcommand("analyze", "impulse response, prediction, prototype and independence analyses");
  analyze->require_subcommand(1);
  auto common_feature = [&](CLI::App* s) {
    s->add_option("--feature", o.feature, "feature name")->required();
    s->add_option("--bin-width", o.bin_width, "bin width of continuous features");
    s->add_option("--out", o.outp, "output directory")->required();
  };
  {
    auto* s = analyze->add_subcommand("impulse", "impulse response from single-mode training samples");
    s->add_option("--q", o.q, "learned samples (manifest)")->required();
    s->add_option("--mode", o.mode, "training mode value")->required();
    common_feature(s);
    bind(s, "analyze impulse", [&] {
      const auto q = manifest_histogram(read_manifest(o.q), o.feature, o.bin_width);
      const auto ir = estimate_impulse_response(q, *o.mode);
      write_text_file(fs::path(o.outp) / "impulse.txt", to_text(ir));
      write_text_file(fs::path(o.outp) / "impulse.json", impulse_to_json(ir, o.feature).dump(2) + "\n");
      write_text_file(fs::path(o.outp) / "kernel.csv", to_csv(ir.kernel));
      out << to_text(ir);
      Provenance prov(args, command);
      prov.output(o.outp);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }
  {
    auto* s = analyze->add_subcommand("predict", "convolve a training distribution with an impulse response");
    s->add_option("--p", o.p, "training manifest")->required();
    s->add_option("--impulse", o.impulse, "impulse.json or its directory")->required();
    common_feature(s);
    bind(s, "analyze predict", [&] {
      const auto p = manifest_histogram(read_manifest(o.p), o.feature, o.bin_width);
      const auto predicted = predict_response(p, read_impulse(o.impulse));
      write_text_file(fs::path(o.outp) / "p.csv", to_csv(p));
      write_text_file(fs::path(o.outp) / "predicted.csv", to_csv(predicted));
      out << to_csv(predicted);
      Provenance prov(args, command);
      prov.output(o.outp);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }
  {
    auto* s = analyze->add_subcommand("prototype", "prototype-enhancement detection");
    s->add_option("--p", o.p, "training manifest")->required();
    s->add_option("--q", o.q, "learned samples (manifest)")->required();
    s->add_option("--impulse", o.impulse, "impulse.json or its directory")->required();
    s->add_option("--window", o.window, "moving-average window in bins");
    s->add_option("--prominence", o.prominence, "peak prominence as a fraction of the maximum");
    s->add_option("--delta-bins", o.delta_bins, "concentration half-window in bins");
    s->add_option("--ratio-threshold", o.ratio, "concentration ratio needed");
    s->add_option("--center", o.center, "concentration center (default: training mean)");
    common_feature(s);
    bind(s, "analyze prototype", [&] {
      const auto train = read_manifest(o.p);
      const auto p = manifest_histogram(train, o.feature, o.bin_width);
      const auto actual = manifest_histogram(read_manifest(o.q), o.feature, o.bin_width);
      const auto predicted = predict_response(p, read_impulse(o.impulse));
      PrototypeConfig cfg{o.window, o.prominence, o.delta_bins, o.ratio, o.center};
      if (!cfg.center) cfg.center = manifest_mean(train, o.feature);
      const auto r = detect_prototype_enhancement(predicted, actual, cfg);
      const fs::path dir = o.outp;
      write_text_file(dir / "p.csv", to_csv(p));
      write_text_file(dir / "predicted.csv", to_csv(predicted));
      write_text_file(dir / "actual.csv", to_csv(actual));
      write_text_file(dir / "prototype.txt", to_text(r));
      out << to_text(r);
      Provenance prov(args, command);
      prov.output(o.outp);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }
  {
    auto* s = analyze->add_subcommand("independence", "marginal invariance across nuisance configurations");
    s->add_option("--config", o.configs, "K=manifest, repeatable")->required();
    common_feature(s);
    bind(s, "analyze independence", [&] {
      std::vector<std::pair<int, Histogram>> marginals;
      for (const auto& c : o.configs) {
        const auto eq = c.find('=');
        require(eq != std::string::npos, ErrorCode::usage, "--config expects K=manifest, got '" + c + "'");
        int k = 0;
        try {
          k = std::stoi(c.substr(0, eq));
        } catch (const std::logic_error&) {
          fail(ErrorCode::usage, "--config K must be an integer in '" + c + "'");
        }
        marginals.emplace_back(k, manifest_histogram(read_manifest(c.substr(eq + 1)), o.feature, o.bin_width));
      }
      const auto r = independence_report(std::move(marginals), o.feature);
      write_text_file(fs::path(o.outp) / "independence.txt", to_text(r));
      out << to_text(r);
      Provenance prov(args, command);
      prov.output(o.outp);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }

  // metrics
  auto* metrics = app.add_subcommand("metrics", "support and label-distribution metrics");
  metrics->require_subcommand(1);
  auto metric_inputs = [&](CLI::App* s) {
    s->add_option("--p-manifest,--p", o.p, "training manifest")->required();
    s->add_option("--q-samples,--q", o.q, "sample manifest (or sample directory)")->required();
    s->add_option("--labels", o.labels, "labels.jsonl overriding the samples' combinations");
    s->add_option("--feature", o.feature, "feature (default combination)");
    s->add_option("--bin-width", o.bin_width, "bin width of continuous features");
    s->add_option("--out", o.outp, "also write key/value results here");
  };
  auto load_pq = [&]() -> MetricInputs {
    auto qm = read_manifest(o.q);
    if (!o.labels.empty()) apply_labels(qm, read_labels_jsonl(o.labels), o.feature);
    return {manifest_histogram(read_manifest(o.p), o.feature, o.bin_width), manifest_histogram(qm, o.feature, o.bin_width)};
  };
  auto finish_metrics = [&](const std::string& text) {
    out << text;
    Provenance prov(args, command);
    if (!o.outp.empty()) {
      write_text_file(o.outp, text);
      prov.output(o.outp);
    }
    prov.write(!provenance_override.empty() ? fs::path(provenance_override)
               : o.outp.empty()             ? fs::path("run.json")
                                            : provenance_path_for_file(o.outp));
  };
  {
    auto* s = metrics->add_subcommand("support", "support of the samples under the 10% rule");
    metric_inputs(s);
    bind(s, "metrics support", [&] {
      const auto [p, q] = load_pq();
      const auto ps = positive_support(p);
      const auto qs = support_of(q, static_cast<std::int64_t>(ps.members.size()));
      std::string text = "p_support_size " + std::to_string(ps.members.size()) + "\nq_support_size " +
                         std::to_string(qs.members.size()) + "\nq_support";
      for (auto id : qs.members) text += " " + q.axis().label(id);
      finish_metrics(text + "\n");
    });
  }
  {
    auto* s = metrics->add_subcommand("pr", "support precision and recall");
    metric_inputs(s);
    bind(s, "metrics pr", [&] {
      const auto [p, q] = load_pq();
      const auto ps = positive_support(p);
      const auto pr = precision_recall(ps, support_of(q, static_cast<std::int64_t>(ps.members.size())));
      MetricsReport r;
      r.precision = pr.precision;
      r.recall = pr.recall;
      std::string text = r.to_kv();
      if (pr.vacuous_precision) text += "precision_vacuous true\n";
      if (pr.vacuous_recall) text += "recall_vacuous true\n";
      finish_metrics(text);
    });
  }
  {
    auto* s = metrics->add_subcommand("ce", "cross entropy H(p, q) in bits");
    metric_inputs(s);
    s->add_option("--alpha", o.alpha, "Laplace smoothing constant (0 disables)");
    bind(s, "metrics ce", [&] {
      const auto [p, q] = load_pq();
      MetricsReport r;
      r.ce = cross_entropy(p, q, o.alpha);
      finish_metrics(r.to_kv());
    });
  }
  {
    auto* s = metrics->add_subcommand("emd", "earth mover's distance");
    metric_inputs(s);
    s->add_option("--metric", o.metric, "ground metric")->check(CLI::IsMember({"scalar_abs", "digit_l1"}));
    s->add_option_function<std::string>(
        "--ground", [&](const std::string& v) { o.metric = v; }, "alias of --metric");
    s->add_flag("--force-flow", o.force_flow, "solve the transport problem even in 1D");
    bind(s, "metrics emd", [&] {
      const auto [p, q] = load_pq();
      MetricsReport r;
      EmdOptions opt;
      opt.metric = o.metric == "digit_l1" ? GroundMetric::digit_l1 : GroundMetric::scalar_abs;
      opt.force_flow = o.force_flow;
      r.emd = emd(p, q, opt);
      finish_metrics(r.to_kv());
    });
  }
  {
    auto* s = metrics->add_subcommand("auc", "AUC of q separating in-support from out-of-support combinations");
    metric_inputs(s);
    bind(s, "metrics auc", [&] {
      const auto [p, q] = load_pq();
      MetricsReport r;
      r.auc = auc(positive_support(p), q);
      finish_metrics(r.to_kv());
    });
  }
  {
    auto* s = metrics->add_subcommand("marginals", "per-group marginals of p and q");
    metric_inputs(s);
    s->add_option("--group", o.group, "group index (default: all)");
    bind(s, "metrics marginals", [&] {
      const auto [p, q] = load_pq();
      require(p.axis().kind == AxisKind::combination, ErrorCode::usage, "marginals need a combination feature");
      const auto groups = p.axis().space->groups().size();
      std::string text = "group,value,p,q,diff\n";
      for (std::size_t g = 0; g < groups; ++g) {
        if (o.group >= 0 && static_cast<std::size_t>(o.group) != g) continue;
        const auto rows = marginal_preservation(p, q, g);
        for (std::size_t v = 0; v < rows.size(); ++v)
          text += std::to_string(g) + "," + std::to_string(v) + "," + detail::fmt(rows[v].p) + "," + detail::fmt(rows[v].q) +
                  "," + detail::fmt(rows[v].diff) + "\n";
      }
      finish_metrics(text);
    });
  }

  // mdl
  {
    auto* s = app.add_subcommand("mdl", "code-length model of combination supports");
    s->add_option("--c", o.c, "cost of one 'all' set");
    s->add_option("--d", o.d, "exception multiplier");
    s->add_option("--groups", o.groups, "number of groups N");
    s->add_option("--values", o.values, "values per group v");
    auto* gopt = s->add_option("--g", o.g, "support size as a percentage of the space");
    s->add_flag("--table", o.table, "code lengths over the standard percentage grid")->excludes(gopt);
    s->add_flag("--csv", o.csv, "CSV output for --table");
    bind(s, "mdl", [&] {
      const mdl::CodeCostParams params{o.c, o.d, o.groups, o.values};
      params.validate();
      std::string text;
      if (o.g) {
        text = detail::fmt(mdl::code_length(mdl::support_size_for_percent(*o.g, params), params));
        if (text.size() > 2 && text.ends_with(".0")) text.resize(text.size() - 2);
        text += "\n";
      } else if (o.table) {
        const auto rows = mdl::code_length_table(mdl::standard_grid(), params);
        text = o.csv ? "percent,support_size,enumeration,complement,code_length\n" : "";
        for (const auto& r : rows) {
          char buf[160];
          std::snprintf(buf, sizeof buf, o.csv ? "%g,%lld,%g,%g,%g\n" : "g=%g%% |S|=%lld enumeration=%g complement=%g L=%g\n",
                        r.percent, static_cast<long long>(r.support_size), r.enumeration, r.complement, r.length);
          text += buf;
        }
      } else {
        const auto gs = mdl::g_star(params);
        char buf[120];
        std::snprintf(buf, sizeof buf, "g_star_percent %.12g\ng_star_size %.12g\n", gs.percent, gs.size);
        text = buf;
      }
      out << text;
      Provenance prov(args, command);
      prov.config({{"c", o.c}, {"d", o.d}, {"groups", o.groups}, {"values", o.values}});
      prov.write(provenance_override.empty() ? fs::path("run.json") : fs::path(provenance_override));
    });
  }

  // report
  {
    auto* s = app.add_subcommand("report", "CSV tables and SVG overlays from analysis outputs");
    s->add_option("--in", o.in, "experiment or analysis directory")->required()->check(CLI::ExistingDirectory);
    s->add_option("--out", o.outp, "report directory")->required();
    bind(s, "report", [&] {
      const auto written = write_report(o.in, o.outp, err);
      out << "wrote " << written.size() << " report files to " << o.outp << "\n";
      Provenance prov(args, command);
      for (const auto& w : written) prov.output(w);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }

  // learn
  {
    auto* s = app.add_subcommand("learn", "fit the reference learner and draw samples");
    s->add_option("--config", o.config, "learner config JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--train", o.train, "training manifest or dataset directory")->required();
    s->add_option("--out", o.outp, "sample directory")->required();
    s->add_option("--n", o.n, "number of samples (default: config sample_count)");
    s->add_option("--seed", o.seed, "override the config seed");
    s->add_option("--render", o.render, "render samples as images")->check(CLI::IsMember({"pie", "dots", "mnist3"}));
    s->add_option("--image-size", o.image_size, "rendered image size");
    s->add_option("--mnist-images", o.mnist_images, "digits for mnist3 rendering");
    s->add_option("--mnist-labels", o.mnist_labels, "labels for mnist3 rendering");
    bind(s, "learn", [&] {
      const json cj = read_json_file(o.config);
      const auto lc = learner_config_from_json(cj);
      const auto seed = resolve_seed(o.seed, lc.seed);
      const auto model = fit(read_manifest(o.train), lc);
      const auto m = sample(model, o.n.value_or(lc.sample_count), seed.value);
      const fs::path dir = o.outp;
      write_manifest(dir / "manifest.jsonl", m);
      write_text_file(dir / "model.json", to_json(model).dump(2) + "\n");
      if (!o.render.empty()) {
        std::optional<DigitSet> digits;
        if (o.render == "mnist3") digits = detail::load_digits(o);
        render_manifest(m, dir, {o.render, o.image_size, digits ? &*digits : nullptr});
      }
      out << "drew " << m.size() << " samples into " << o.outp << "\n";
      Provenance prov(args, command);
      prov.seed(seed);
      prov.config(cj);
      prov.output(dir / "manifest.jsonl");
      prov.write(provenance_override.empty() ? provenance_path_for_dir(dir) : fs::path(provenance_override));
    });
  }

  // experiment
  {
    auto* s = app.add_subcommand("experiment", "train distribution, learner, analyses, metrics and report in one run");
    s->add_option("--config", o.config, "experiment config JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", o.outp, "output directory")->required();
    s->add_option("--seed", o.seed, "override the config seed");
    bind(s, "experiment", [&] {
      const json cj = read_json_file(o.config);
      require(cj.is_object(), ErrorCode::spec_invalid, "experiment config must be a JSON object");
      const auto seed = resolve_seed(o.seed, cj.value("seed", std::uint64_t{0}));
      const auto base = fs::absolute(o.config).parent_path();
      const auto result = run_experiment(cj, o.outp, seed.value, base, out);
      const auto written = write_report(o.outp, fs::path(o.outp) / "report", err);
      Provenance prov(args, command);
      prov.seed(seed);
      prov.config(cj);
      for (const auto& p : result.outputs) prov.output(p);
      for (const auto& p : written) prov.output(p);
      prov.write(provenance_override.empty() ? provenance_path_for_dir(o.outp) : fs::path(provenance_override));
    });
  }

  // replay
  {
    auto* s = app.add_subcommand("replay", "re-run a recorded command");
    s->add_option("--run", o.runfile, "run.json to replay")->required()->check(CLI::ExistingFile);
    s->add_option("--out", o.outp, "replace the recorded --out");
    bind(s, "replay", [] {});
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (command == "replay") {
      const auto rec = read_json_file(o.runfile);
      auto argv = rec.at("argv").get<std::vector<std::string>>();
      require(!argv.empty() && argv.front() != "replay", ErrorCode::spec_invalid, "run.json holds no replayable command");
      if (!o.outp.empty()) {
        const auto it = std::find(argv.begin(), argv.end(), "--out");
        require(it != argv.end() && it + 1 != argv.end(), ErrorCode::usage, "recorded command has no --out");
        *(it + 1) = fs::absolute(o.outp).string();
      }
      if (rec.contains("seed") && std::find(argv.begin(), argv.end(), "--seed") == argv.end()) {
        argv.push_back("--seed");
        argv.push_back(std::to_string(rec.at("seed").get<std::uint64_t>()));
      }
      const auto cwd = fs::current_path();
      const fs::path recorded = rec.value("cwd", cwd.string());
      if (fs::is_directory(recorded)) fs::current_path(recorded);
      int code = 0;
      try {
        code = run(argv, out, err);
      } catch (...) {
        fs::current_path(cwd);
        throw;
      }
      fs::current_path(cwd);
      return code;
    }
    action();
  } catch (const Error& e) {
    err << "genprobe: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const json::exception& e) {
    err << "genprobe: SpecInvalid: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "genprobe: Io: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace genprobe::cli
