#pragma once

// Procedural probe datasets: pies (one colored circle on white with a red
// slice of controlled proportion) and dots (k non-overlapping dots on black).
//
// Every image is a pure function of (base_seed, index); see item_seed().

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "genprobe/core.hpp"
#include "genprobe/error.hpp"
#include "genprobe/image.hpp"
#include "genprobe/manifest.hpp"
#include "genprobe/parallel.hpp"
#include "genprobe/random.hpp"

namespace genprobe {

enum class Generator { dots, pie };

inline std::string to_string(Generator g) { return g == Generator::dots ? "dots" : "pie"; }

inline Generator generator_from_string(const std::string& s) {
  if (s == "dots") return Generator::dots;
  if (s == "pie") return Generator::pie;
  fail(ErrorCode::spec_invalid, "unknown generator '" + s + "'");
}

namespace pie {
inline constexpr double kSizeMin = 0.3;
inline constexpr double kSizeMax = 0.9;
inline constexpr double kLocMax = 0.2;
inline constexpr int kSwaps = 4;
inline constexpr double kSwapMinDeg = 10.0;
inline constexpr double kSwapMaxDeg = 90.0;
inline constexpr Rgb kRed{255, 0, 0};
inline constexpr Rgb kBackground{255, 255, 255};
}  // namespace pie

namespace dots {
inline constexpr Rgb kBackground{0, 0, 0};
inline constexpr int kMaxAttempts = 1000;
inline constexpr std::uint8_t kMinBrightness = 200;
inline constexpr std::int64_t kMaxCount = 100;
}  // namespace dots

/// Feature specs of the pie dataset: red_proportion in [0,1], size as radius
/// over half the image width in [0.3,0.9], loc_x/loc_y as center offsets over
/// the image width in [-0.2,0.2].
inline std::vector<FeatureSpec> pie_feature_specs(double bin_width = 0.02) {
  return {
      FeatureSpec::continuous("red_proportion", 0.0, 1.0, bin_width),
      FeatureSpec::continuous("size", pie::kSizeMin, pie::kSizeMax, bin_width),
      FeatureSpec::continuous("loc_x", -pie::kLocMax, pie::kLocMax, bin_width),
      FeatureSpec::continuous("loc_y", -pie::kLocMax, pie::kLocMax, bin_width),
  };
}

inline std::vector<FeatureSpec> dots_feature_specs() { return {FeatureSpec::integer_range("count", 0, dots::kMaxCount)}; }

/// Known spec for a feature name produced by the generators or evaluators.
inline std::optional<FeatureSpec> standard_feature_spec(const std::string& name, double bin_width = 0.02) {
  for (auto& s : pie_feature_specs(bin_width))
    if (s.name == name) return s;
  for (auto& s : dots_feature_specs())
    if (s.name == name) return s;
  return std::nullopt;
}

/// Two arcs [a, a+w) and [b, b+w) (degrees, mod 360) exchanged by one swap.
struct ArcSwap {
  double a = 0, b = 0, width = 0;
};

struct PieParams {
  double red_proportion = 0.0;
  double size = 0.5;
  double loc_x = 0.0;
  double loc_y = 0.0;
  std::array<Rgb, 3> other_colors{};
  std::vector<ArcSwap> swaps;

  void validate() const {
    require(red_proportion >= 0.0 && red_proportion <= 1.0, ErrorCode::spec_invalid, "red_proportion outside [0,1]");
    require(size >= pie::kSizeMin - 1e-12 && size <= pie::kSizeMax + 1e-12, ErrorCode::spec_invalid,
            "size outside [0.3,0.9]");
    for (double loc : {loc_x, loc_y}) {
      require(std::abs(loc) <= pie::kLocMax + 1e-12, ErrorCode::spec_invalid, "location outside [-0.2,0.2]");
      // size*(W/2) + |loc|*W <= W/2
      require(size / 2 + std::abs(loc) <= 0.5 + 1e-12, ErrorCode::spec_invalid, "circle leaves the image");
    }
    for (const auto& c : other_colors) {
      require(c.r == 0 && std::max(c.g, c.b) >= 80, ErrorCode::spec_invalid, "non-red color must have R=0, max(G,B)>=80");
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const int dist = std::abs(other_colors[i].g - other_colors[j].g) + std::abs(other_colors[i].b - other_colors[j].b);
        require(dist >= 60, ErrorCode::spec_invalid, "non-red colors too similar");
      }
  }

  FeatureVector features() const {
    return {{{"red_proportion", red_proportion}, {"size", size}, {"loc_x", loc_x}, {"loc_y", loc_y}}};
  }
};

struct Dot {
  double x = 0, y = 0;  // center, pixels
  Rgb color;
};

struct DotsParams {
  std::int64_t count = 0;
  double radius = 3.0;
  std::vector<Dot> dots;

  FeatureVector features() const { return {{{"count", count}}}; }
};

/// Dot radius in pixels: 3 px at 64x64, linear in image size.
inline double dot_radius(int image_size) { return 3.0 * image_size / 64.0; }

/// Minimum center distance between two dots.
inline double dot_spacing(double radius) { return 2.0 * radius + 2.0; }

struct SupportEntry {
  FeatureVector features;  // controlled features only; omitted ones are random
  double probability = 0.0;
};

/// Declarative training distribution for a generator.
struct DatasetSpec {
  Generator generator = Generator::pie;
  std::vector<SupportEntry> support;
  std::size_t image_count = 0;
  std::uint64_t base_seed = 0;
  int image_size = 64;

  std::vector<FeatureSpec> feature_specs() const {
    return generator == Generator::pie ? pie_feature_specs() : dots_feature_specs();
  }

  void validate() const {
    require(image_size >= 16 && image_size <= 4096, ErrorCode::spec_invalid, "image_size must lie in [16, 4096]");
    if (support.empty()) {
      require(generator == Generator::pie, ErrorCode::spec_invalid, "dots spec needs a support over 'count'");
      return;
    }
    const auto specs = feature_specs();
    double total = 0.0;
    for (const auto& entry : support) {
      require(entry.probability >= 0.0, ErrorCode::spec_invalid, "negative support probability");
      total += entry.probability;
      for (const auto& [name, value] : entry.features.values) {
        const auto it = std::find_if(specs.begin(), specs.end(), [&](const FeatureSpec& s) { return s.name == name; });
        require(it != specs.end(), ErrorCode::spec_invalid,
                "feature '" + name + "' is not controlled by the " + to_string(generator) + " generator");
        require(it->contains(value), ErrorCode::spec_invalid,
                "value " + genprobe::to_string(value) + " outside the domain of '" + name + "'");
      }
      if (generator == Generator::dots) {
        require(entry.features.contains("count"), ErrorCode::spec_invalid, "dots support entries must set 'count'");
      } else {
        const auto get = [&](const char* n) -> std::optional<double> {
          return entry.features.contains(n) ? numeric_value(entry.features.at(n)) : std::nullopt;
        };
        const double loc = std::max(std::abs(get("loc_x").value_or(0.0)), std::abs(get("loc_y").value_or(0.0)));
        if (const auto s = get("size"))
          require(*s / 2 + loc <= 0.5 + 1e-12, ErrorCode::spec_invalid, "support entry places the circle outside the image");
      }
    }
    require(std::abs(total - 1.0) <= 1e-9, ErrorCode::spec_invalid, "support probabilities must sum to 1");
  }
};

inline json to_json(const DatasetSpec& spec) {
  json j;
  j["generator"] = to_string(spec.generator);
  j["image_count"] = spec.image_count;
  j["base_seed"] = spec.base_seed;
  j["image_size"] = spec.image_size;
  j["support"] = json::array();
  for (const auto& e : spec.support) j["support"].push_back({{"features", to_json(e.features)}, {"probability", e.probability}});
  return j;
}

/// Parses a dataset spec. Support feature values may be the string "random",
/// which leaves that feature uncontrolled.
inline DatasetSpec dataset_spec_from_json(const json& j) {
  require(j.is_object(), ErrorCode::spec_invalid, "dataset spec must be a JSON object");
  DatasetSpec spec;
  try {
    spec.generator = generator_from_string(j.at("generator").get<std::string>());
    spec.image_count = j.value("image_count", std::size_t{0});
    spec.base_seed = j.value("base_seed", std::uint64_t{0});
    spec.image_size = j.value("image_size", 64);
    for (const auto& e : j.value("support", json::array())) {
      SupportEntry entry;
      entry.probability = e.at("probability").get<double>();
      for (const auto& [name, value] : e.at("features").items()) {
        if (value.is_string() && value.get<std::string>() == "random") continue;
        entry.features.values[name] = feature_value_from_json(value);
        if (spec.generator == Generator::pie) {
          const auto d = numeric_value(entry.features.values[name]);
          require(d.has_value(), ErrorCode::spec_invalid, "pie feature '" + name + "' must be numeric");
          entry.features.values[name] = *d;
        }
      }
      spec.support.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::spec_invalid, std::string("dataset spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

/// Uniform mixture over support entries built from a value grid.
inline std::vector<SupportEntry> uniform_support(const std::string& feature, std::span<const FeatureValue> values) {
  std::vector<SupportEntry> out;
  for (const auto& v : values) out.push_back({{{{feature, v}}}, 1.0 / static_cast<double>(values.size())});
  return out;
}

namespace detail {

inline const SupportEntry* draw_entry(const DatasetSpec& spec, Rng& rng) {
  if (spec.support.empty()) return nullptr;
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& entry : spec.support) {
    acc += entry.probability;
    if (u < acc) return &entry;
  }
  return &spec.support.back();
}

inline std::optional<double> controlled(const SupportEntry* entry, const char* name) {
  if (!entry || !entry->features.contains(name)) return std::nullopt;
  return numeric_value(entry->features.at(name));
}

inline double wrap_degrees(double deg) {
  deg = std::fmod(deg, 360.0);
  return deg < 0 ? deg + 360.0 : deg;
}

/// True when deg lies in the arc [start, start + width) taken mod 360.
inline bool in_arc(double deg, double start, double width) { return wrap_degrees(deg - start) < width; }

}  // namespace detail

/// Three uniformly random colors with R = 0, max(G,B) >= 80 and pairwise
/// |dG| + |dB| >= 60.
inline std::array<Rgb, 3> draw_other_colors(Rng& rng) {
  std::array<Rgb, 3> colors{};
  for (;;) {
    for (auto& c : colors) {
      do {
        c = Rgb{0, static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256))};
      } while (std::max(c.g, c.b) < 80);
    }
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i)
      for (int j = i + 1; j < 3 && ok; ++j)
        ok = std::abs(colors[i].g - colors[j].g) + std::abs(colors[i].b - colors[j].b) >= 60;
    if (ok) return colors;
  }
}

/// Four swaps of two disjoint arcs of equal random width in [10, 90] degrees;
/// arcs may wrap through 0 degrees.
inline std::vector<ArcSwap> draw_swaps(Rng& rng) {
  std::vector<ArcSwap> swaps;
  for (int s = 0; s < pie::kSwaps; ++s) {
    const double w = rng.uniform(pie::kSwapMinDeg, pie::kSwapMaxDeg);
    const double a = rng.uniform(0.0, 360.0);
    const double b = detail::wrap_degrees(a + w + rng.uniform(0.0, 360.0 - 2.0 * w));
    swaps.push_back({a, b, w});
  }
  return swaps;
}

/// Pie parameters given explicit feature values (null = draw uniformly within
/// the admissible range), with the color layout drawn from rng.
inline PieParams draw_pie(Rng& rng, std::optional<double> red, std::optional<double> size, std::optional<double> loc_x,
                          std::optional<double> loc_y) {
  PieParams p;
  p.red_proportion = red ? *red : rng.uniform();
  if (size) {
    p.size = *size;
  } else {
    const double loc = std::max(std::abs(loc_x.value_or(0.0)), std::abs(loc_y.value_or(0.0)));
    p.size = rng.uniform(pie::kSizeMin, std::min(pie::kSizeMax, 1.0 - 2.0 * loc));
  }
  const double loc_range = std::min(pie::kLocMax, (1.0 - p.size) / 2.0);
  p.loc_x = loc_x ? *loc_x : rng.uniform(-loc_range, loc_range);
  p.loc_y = loc_y ? *loc_y : rng.uniform(-loc_range, loc_range);
  p.other_colors = draw_other_colors(rng);
  p.swaps = draw_swaps(rng);
  return p;
}

inline PieParams draw_pie(const DatasetSpec& spec, std::size_t index) {
  Rng rng(item_seed(spec.base_seed, index));
  const auto* entry = detail::draw_entry(spec, rng);
  return draw_pie(rng, detail::controlled(entry, "red_proportion"), detail::controlled(entry, "size"),
                  detail::controlled(entry, "loc_x"), detail::controlled(entry, "loc_y"));
}

/// Color at angle `deg` after applying the swaps. The color map starts as
/// red on [0, 360p) followed by three equal arcs of the other colors.
inline Rgb pie_color_at(const PieParams& p, double deg) {
  // Each swap is an involution on angles; the final map is
  // init(s1(s2(s3(s4(deg))))).
  for (auto it = p.swaps.rbegin(); it != p.swaps.rend(); ++it) {
    if (detail::in_arc(deg, it->a, it->width)) deg = detail::wrap_degrees(deg - it->a + it->b);
    else if (detail::in_arc(deg, it->b, it->width)) deg = detail::wrap_degrees(deg - it->b + it->a);
  }
  const double red_end = 360.0 * p.red_proportion;
  if (deg < red_end) return pie::kRed;
  const double rest = (360.0 - red_end) / 3.0;
  const int slot = std::min(2, static_cast<int>((deg - red_end) / rest));
  return p.other_colors[static_cast<std::size_t>(slot)];
}

/// Hard-edged raster: a pixel belongs to the circle when its center does.
inline Image render_pie(const PieParams& p, int image_size = 64) {
  Image img = Image::rgb(image_size, image_size, pie::kBackground);
  const double w = image_size;
  const double cx = w / 2 + p.loc_x * w;
  const double cy = w / 2 + p.loc_y * w;
  const double r = p.size * w / 2;
  for (int y = 0; y < image_size; ++y) {
    for (int x = 0; x < image_size; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy > r * r) continue;
      const double deg = detail::wrap_degrees(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
      img.set(x, y, pie_color_at(p, deg));
    }
  }
  return img;
}

inline Rgb draw_dot_color(Rng& rng) {
  for (;;) {
    const Rgb c{static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                static_cast<std::uint8_t>(rng.below(256))};
    if (std::max({c.r, c.g, c.b}) >= dots::kMinBrightness) return c;
  }
}

/// Places k dots uniformly inside the canvas, rejecting any position closer
/// than dot_spacing() to an earlier dot.
inline DotsParams place_dots(Rng& rng, std::int64_t k, int image_size) {
  require(k >= 0, ErrorCode::spec_invalid, "dot count must be non-negative");
  DotsParams p;
  p.count = k;
  p.radius = dot_radius(image_size);
  const double spacing = dot_spacing(p.radius);
  const double lo = p.radius, hi = image_size - p.radius;
  for (std::int64_t i = 0; i < k; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < dots::kMaxAttempts && !placed; ++attempt) {
      const double x = rng.uniform(lo, hi), y = rng.uniform(lo, hi);
      placed = std::all_of(p.dots.begin(), p.dots.end(),
                           [&](const Dot& d) { return std::hypot(d.x - x, d.y - y) >= spacing; });
      if (placed) p.dots.push_back({x, y, {}});
    }
    require(placed, ErrorCode::placement_exhausted,
            std::to_string(k) + " dots do not fit on a " + std::to_string(image_size) + " px canvas");
  }
  for (auto& d : p.dots) d.color = draw_dot_color(rng);
  return p;
}

inline DotsParams draw_dots(const DatasetSpec& spec, std::size_t index) {
  Rng rng(item_seed(spec.base_seed, index));
  const auto* entry = detail::draw_entry(spec, rng);
  require(entry != nullptr, ErrorCode::spec_invalid, "dots spec needs a support");
  const auto k = entry->features.at("count");
  const auto count = numeric_value(k);
  require(count.has_value(), ErrorCode::spec_invalid, "dot count must be an integer");
  return place_dots(rng, static_cast<std::int64_t>(*count), spec.image_size);
}

inline Image render_dots(const DotsParams& p, int image_size = 64) {
  Image img = Image::rgb(image_size, image_size, dots::kBackground);
  const double r2 = p.radius * p.radius;
  for (const auto& d : p.dots) {
    const int x0 = std::max(0, static_cast<int>(std::floor(d.x - p.radius)));
    const int x1 = std::min(image_size - 1, static_cast<int>(std::ceil(d.x + p.radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(d.y - p.radius)));
    const int y1 = std::min(image_size - 1, static_cast<int>(std::ceil(d.y + p.radius)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - d.x, dy = y + 0.5 - d.y;
        if (dx * dx + dy * dy <= r2) img.set(x, y, d.color);
      }
  }
  return img;
}

/// Ground-truth record of image `index`, and the rendered image when asked.
inline ManifestRecord generate_item(const DatasetSpec& spec, std::size_t index, Image* image = nullptr) {
  ManifestRecord rec;
  rec.file = "images/" + image_name(index);
  rec.seed = item_seed(spec.base_seed, index);
  if (spec.generator == Generator::pie) {
    const auto p = draw_pie(spec, index);
    rec.features = p.features();
    if (image) *image = render_pie(p, spec.image_size);
  } else {
    const auto p = draw_dots(spec, index);
    rec.features = p.features();
    if (image) *image = render_dots(p, spec.image_size);
  }
  return rec;
}

/// Manifest for images [begin, end) without rendering.
inline DatasetManifest plan_dataset(const DatasetSpec& spec, std::size_t begin = 0,
                                    std::optional<std::size_t> end = std::nullopt) {
  spec.validate();
  const std::size_t stop = std::min(end.value_or(spec.image_count), spec.image_count);
  DatasetManifest m;
  if (begin >= stop) return m;
  m.records.resize(stop - begin);
  parallel_for(stop - begin, [&](std::size_t i) { m.records[i] = generate_item(spec, begin + i); });
  return m;
}

/// Writes `<out>/images/img_NNNNNN.png` for indices [begin, end),
/// `<out>/manifest.jsonl` and `<out>/spec.json`.
inline DatasetManifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out, std::size_t begin = 0,
                                        std::optional<std::size_t> end = std::nullopt) {
  spec.validate();
  const std::size_t stop = std::min(end.value_or(spec.image_count), spec.image_count);
  std::filesystem::create_directories(out / "images");
  DatasetManifest m;
  if (begin < stop) {
    m.records.resize(stop - begin);
    parallel_for(stop - begin, [&](std::size_t i) {
      Image img;
      m.records[i] = generate_item(spec, begin + i, &img);
      write_png(out / m.records[i].file, img);
    });
  }
  write_manifest(out / "manifest.jsonl", m);
  write_text_file(out / "spec.json", to_json(spec).dump(2) + "\n");
  return m;
}

inline DatasetManifest gen_pie(const DatasetSpec& spec, const std::filesystem::path& out) {
  require(spec.generator == Generator::pie, ErrorCode::spec_invalid, "gen_pie needs a pie spec");
  return generate_dataset(spec, out);
}

inline DatasetManifest gen_dots(const DatasetSpec& spec, const std::filesystem::path& out) {
  require(spec.generator == Generator::dots, ErrorCode::spec_invalid, "gen_dots needs a dots spec");
  return generate_dataset(spec, out);
}

/// Renders an image showing the given features, drawing every feature the
/// vector leaves out (and the color layout) from `seed`. Used to turn sampled
/// feature vectors back into images for evaluator round-trips.
inline Image render_features(Generator generator, const FeatureVector& fv, std::uint64_t seed, int image_size = 64) {
  Rng rng(seed);
  const auto get = [&](const char* n) -> std::optional<double> {
    const auto it = fv.values.find(n);
    return it == fv.values.end() ? std::nullopt : numeric_value(it->second);
  };
  if (generator == Generator::pie)
    return render_pie(draw_pie(rng, get("red_proportion"), get("size"), get("loc_x"), get("loc_y")), image_size);
  const auto k = get("count");
  require(k.has_value(), ErrorCode::domain_mismatch, "dots rendering needs a 'count' feature");
  return render_dots(place_dots(rng, static_cast<std::int64_t>(std::llround(*k)), image_size), image_size);
}

/// `count` distinct combination ids drawn uniformly without replacement,
/// returned in ascending (canonical) order.
inline std::vector<std::int64_t> sample_combinations(const CombinationSpace& space, std::int64_t count, std::uint64_t seed) {
  require(count >= 0, ErrorCode::count_too_large, "negative combination count");
  require(count <= space.size(), ErrorCode::count_too_large,
          std::to_string(count) + " exceeds the space size " + std::to_string(space.size()));
  std::vector<std::int64_t> ids(static_cast<std::size_t>(space.size()));
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  Rng rng(mix64(seed));
  for (std::int64_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(space.size() - i)));
    std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
  }
  ids.resize(static_cast<std::size_t>(count));
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace genprobe
