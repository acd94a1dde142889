#pragma once

// Per-image feature evaluators: background segmentation, size, location,
// red proportion and dot counting, plus bulk evaluation of a sample
// directory.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "genprobe/core.hpp"
#include "genprobe/error.hpp"
#include "genprobe/image.hpp"
#include "genprobe/manifest.hpp"
#include "genprobe/parallel.hpp"

namespace genprobe {

struct BackgroundPolicy {
  enum class Mode { light, dark };
  Mode mode = Mode::light;
  int threshold = 250;

  static BackgroundPolicy light(int threshold = 250) { return {Mode::light, threshold}; }
  static BackgroundPolicy dark(int threshold = 5) { return {Mode::dark, threshold}; }

  /// light: min channel >= threshold; dark: max channel <= threshold.
  bool is_background(Rgb c) const {
    return mode == Mode::light ? std::min({c.r, c.g, c.b}) >= threshold : std::max({c.r, c.g, c.b}) <= threshold;
  }
};

struct ForegroundMask {
  int width = 0, height = 0;
  std::vector<bool> background;  // row-major
  std::size_t foreground = 0;

  bool is_foreground(int x, int y) const { return !background[static_cast<std::size_t>(y) * width + x]; }
};

inline ForegroundMask background_mask(const Image& img, const BackgroundPolicy& policy) {
  ForegroundMask m;
  m.width = img.width;
  m.height = img.height;
  m.background.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const bool bg = policy.is_background(img.at(x, y));
      m.background[static_cast<std::size_t>(y) * img.width + x] = bg;
      if (!bg) ++m.foreground;
    }
  return m;
}

namespace detail {
inline ForegroundMask require_foreground(const Image& img, const BackgroundPolicy& policy) {
  auto m = background_mask(img, policy);
  require(m.foreground > 0, ErrorCode::no_foreground, "image has no foreground pixels");
  return m;
}
}  // namespace detail

/// Radius of the disc with the foreground's area, over half the image width.
inline double eval_size(const Image& img, const BackgroundPolicy& policy) {
  const auto m = detail::require_foreground(img, policy);
  const double radius = std::sqrt(static_cast<double>(m.foreground) / std::numbers::pi);
  return radius / (img.width / 2.0);
}

struct Location {
  double x = 0, y = 0;  // offsets from the image center over the width; y downward
};

inline Location eval_location(const Image& img, const BackgroundPolicy& policy) {
  const auto m = detail::require_foreground(img, policy);
  double sx = 0, sy = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (m.is_foreground(x, y)) {
        sx += x + 0.5;
        sy += y + 0.5;
      }
  const double n = static_cast<double>(m.foreground);
  return {(sx / n - img.width / 2.0) / img.width, (sy / n - img.height / 2.0) / img.width};
}

/// Fraction of foreground pixels whose R exceeds both G and B.
inline double eval_red_proportion(const Image& img, const BackgroundPolicy& policy) {
  const auto m = detail::require_foreground(img, policy);
  std::size_t red = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      if (!m.is_foreground(x, y)) continue;
      const auto c = img.at(x, y);
      if (c.r > std::max(c.g, c.b)) ++red;
    }
  return static_cast<double>(red) / static_cast<double>(m.foreground);
}

inline constexpr std::size_t kMinComponentPixels = 4;

/// Number of 4-connected foreground components with at least
/// kMinComponentPixels pixels.
inline std::int64_t count_dots(const Image& img, const BackgroundPolicy& policy = BackgroundPolicy::dark()) {
  const auto m = background_mask(img, policy);
  std::vector<bool> seen(m.background.size(), false);
  std::vector<std::pair<int, int>> stack;
  std::int64_t count = 0;
  for (int y0 = 0; y0 < m.height; ++y0)
    for (int x0 = 0; x0 < m.width; ++x0) {
      const auto i0 = static_cast<std::size_t>(y0) * m.width + x0;
      if (seen[i0] || m.background[i0]) continue;
      std::size_t pixels = 0;
      seen[i0] = true;
      stack.push_back({x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++pixels;
        constexpr int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + dx[k], ny = y + dy[k];
          if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
          const auto ni = static_cast<std::size_t>(ny) * m.width + nx;
          if (seen[ni] || m.background[ni]) continue;
          seen[ni] = true;
          stack.push_back({nx, ny});
        }
      }
      if (pixels >= kMinComponentPixels) ++count;
    }
  return count;
}

/// Features an evaluator can produce by name: red_proportion, size, loc_x,
/// loc_y, count. Callers can register more (the three-digit classifier).
using FeatureEvaluator = std::function<FeatureValue(const Image&, const BackgroundPolicy&)>;

inline FeatureEvaluator standard_evaluator(const std::string& feature) {
  if (feature == "red_proportion")
    return [](const Image& i, const BackgroundPolicy& p) { return FeatureValue{eval_red_proportion(i, p)}; };
  if (feature == "size") return [](const Image& i, const BackgroundPolicy& p) { return FeatureValue{eval_size(i, p)}; };
  if (feature == "loc_x")
    return [](const Image& i, const BackgroundPolicy& p) { return FeatureValue{eval_location(i, p).x}; };
  if (feature == "loc_y")
    return [](const Image& i, const BackgroundPolicy& p) { return FeatureValue{eval_location(i, p).y}; };
  if (feature == "count")
    return [](const Image& i, const BackgroundPolicy& p) { return FeatureValue{count_dots(i, p)}; };
  fail(ErrorCode::usage, "no evaluator for feature '" + feature + "'");
}

struct NamedEvaluator {
  std::string feature;
  FeatureEvaluator evaluate;
};

struct DirectoryEvaluation {
  DatasetManifest manifest;
  std::vector<std::string> rejected;  // files where some feature was NoForeground

  json rejects_json() const {
    return {{"total", manifest.size()}, {"rejected", rejected.size()}, {"files", rejected}};
  }
};

/// PNG files of a sample directory (or its images/ subdirectory), as paths
/// relative to the directory, sorted by name.
inline std::vector<std::string> list_images(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  require(fs::is_directory(dir), ErrorCode::io, dir.string() + " is not a directory");
  const fs::path root = fs::is_directory(dir / "images") ? dir / "images" : dir;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(fs::relative(entry.path(), dir).generic_string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline DirectoryEvaluation eval_directory(const std::filesystem::path& dir, const std::vector<NamedEvaluator>& evaluators,
                                          const BackgroundPolicy& policy) {
  const auto files = list_images(dir);
  require(!files.empty(), ErrorCode::empty_directory, "no PNG files under " + dir.string());
  DirectoryEvaluation out;
  out.manifest.records.resize(files.size());
  std::vector<char> rejected(files.size(), 0);
  parallel_for(files.size(), [&](std::size_t i) {
    const Image img = read_png(dir / files[i]);
    ManifestRecord& rec = out.manifest.records[i];
    rec.file = files[i];
    for (const auto& ev : evaluators) {
      try {
        rec.features.values[ev.feature] = ev.evaluate(img, policy);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::no_foreground) throw;
        rec.features.values[ev.feature] = std::monostate{};
        rejected[i] = 1;
      }
    }
  });
  for (std::size_t i = 0; i < files.size(); ++i)
    if (rejected[i]) out.rejected.push_back(files[i]);
  return out;
}

inline DirectoryEvaluation eval_directory(const std::filesystem::path& dir, const std::vector<std::string>& features,
                                          const BackgroundPolicy& policy) {
  std::vector<NamedEvaluator> evaluators;
  for (const auto& f : features) evaluators.push_back({f, standard_evaluator(f)});
  return eval_directory(dir, evaluators, policy);
}

}  // namespace genprobe
