#pragma once

// Dataset manifests: one JSON object per line,
//   {"file": "images/img_000000.png", "features": {...}, "seed": 123}
// The same layout carries generated datasets, evaluator output and samples
// produced by external learners.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "genprobe/core.hpp"
#include "genprobe/error.hpp"

namespace genprobe {

using json = nlohmann::json;

inline json to_json(const FeatureValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return nullptr;
}

inline FeatureValue feature_value_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  fail(ErrorCode::spec_invalid, "unsupported feature value " + j.dump());
}

inline json to_json(const FeatureVector& fv) {
  json out = json::object();
  for (const auto& [name, value] : fv.values) out[name] = to_json(value);
  return out;
}

inline FeatureVector feature_vector_from_json(const json& j) {
  require(j.is_object(), ErrorCode::spec_invalid, "features must be a JSON object");
  FeatureVector fv;
  for (const auto& [name, value] : j.items()) fv.values[name] = feature_value_from_json(value);
  return fv;
}

struct ManifestRecord {
  std::string file;
  FeatureVector features;
  std::optional<std::uint64_t> seed;

  bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  /// Values of one feature in record order (null where absent).
  std::vector<FeatureValue> column(const std::string& feature) const {
    std::vector<FeatureValue> out;
    out.reserve(records.size());
    for (const auto& r : records) {
      const auto it = r.features.values.find(feature);
      out.push_back(it == r.features.values.end() ? FeatureValue{} : it->second);
    }
    return out;
  }

  void check_unique_files() const {
    std::set<std::string> seen;
    for (const auto& r : records)
      require(seen.insert(r.file).second, ErrorCode::spec_invalid, "duplicate manifest file '" + r.file + "'");
  }

  bool operator==(const DatasetManifest&) const = default;
};

inline std::string to_jsonl_line(const ManifestRecord& r) {
  json j;
  j["file"] = r.file;
  j["features"] = to_json(r.features);
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  return j.dump();
}

inline std::string to_jsonl(const DatasetManifest& m) {
  std::string out;
  for (const auto& r : m.records) out += to_jsonl_line(r) + "\n";
  return out;
}

inline ManifestRecord record_from_json(const json& j) {
  require(j.is_object() && j.contains("file") && j["file"].is_string(), ErrorCode::io,
          "manifest record needs a string 'file'");
  ManifestRecord r;
  r.file = j["file"].get<std::string>();
  if (j.contains("features")) r.features = feature_vector_from_json(j["features"]);
  if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::uint64_t>();
  return r;
}

inline DatasetManifest manifest_from_jsonl(std::istream& in) {
  DatasetManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      m.records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      fail(ErrorCode::io, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << text;
  require(out.good(), ErrorCode::io, "write failed for " + path.string());
}

inline json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::spec_invalid, path.string() + ": " + e.what());
  }
}

/// Reads a manifest from a .jsonl file or from `<dir>/manifest.jsonl`.
inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "manifest.jsonl" : path;
  std::ifstream in(file);
  require(in.good(), ErrorCode::io, "cannot open manifest " + file.string());
  return manifest_from_jsonl(in);
}

inline void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  write_text_file(path, to_jsonl(m));
}

/// Image file name for index i: img_000042.png.
inline std::string image_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%06zu.png", index);
  return buf;
}

}  // namespace genprobe
