#pragma once

// MNIST ingestion (IDX containers, raw or gzip), three-digit composite
// images and a nearest-exemplar digit classifier.

#include <zlib.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genprobe/core.hpp"
#include "genprobe/error.hpp"
#include "genprobe/image.hpp"
#include "genprobe/manifest.hpp"
#include "genprobe/parallel.hpp"
#include "genprobe/random.hpp"

namespace genprobe {

/// IDX container restricted to unsigned-byte payloads (type code 0x08).
struct IdxTensor {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;

  static IdxTensor make(std::vector<std::uint32_t> dims, std::vector<std::uint8_t> data) {
    IdxTensor t;
    t.magic = 0x0800u | static_cast<std::uint32_t>(dims.size());
    t.dims = std::move(dims);
    t.data = std::move(data);
    return t;
  }

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }

  bool operator==(const IdxTensor&) const = default;
};

namespace detail {
inline std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}
inline void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}
}  // namespace detail

/// Decodes an IDX buffer: magic 0x0000 08 NN, NN big-endian dimension sizes,
/// then the row-major payload.
inline IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= 4, ErrorCode::bad_magic, "IDX input shorter than its magic number");
  IdxTensor t;
  t.magic = detail::read_be32(bytes, 0);
  require((t.magic >> 16) == 0, ErrorCode::bad_magic, "IDX magic must start with two zero bytes");
  require(((t.magic >> 8) & 0xFF) == 0x08, ErrorCode::bad_magic, "only unsigned-byte IDX payloads are supported");
  const std::size_t rank = t.magic & 0xFF;
  require(rank >= 1, ErrorCode::bad_magic, "IDX tensor needs at least one dimension");
  require(bytes.size() >= 4 + 4 * rank, ErrorCode::truncated_payload, "IDX header truncated");
  std::size_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    t.dims.push_back(detail::read_be32(bytes, 4 + 4 * i));
    count *= t.dims.back();
  }
  const std::size_t header = 4 + 4 * rank;
  require(bytes.size() - header >= count, ErrorCode::truncated_payload,
          "IDX payload has " + std::to_string(bytes.size() - header) + " bytes, expected " + std::to_string(count));
  t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header),
                bytes.begin() + static_cast<std::ptrdiff_t>(header + count));
  return t;
}

inline std::vector<std::uint8_t> serialize_idx(const IdxTensor& t) {
  require(t.data.size() == t.element_count(), ErrorCode::truncated_payload, "IDX data length differs from dims");
  std::vector<std::uint8_t> out;
  detail::write_be32(out, t.magic);
  for (auto d : t.dims) detail::write_be32(out, d);
  out.insert(out.end(), t.data.begin(), t.data.end());
  return out;
}

inline std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> in) {
  z_stream zs{};
  require(inflateInit2(&zs, 16 + MAX_WBITS) == Z_OK, ErrorCode::io, "inflateInit2 failed");
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> chunk{};
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      fail(ErrorCode::truncated_payload, "corrupt or truncated gzip stream");
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      fail(ErrorCode::truncated_payload, "gzip stream ended early");
    }
  }
  inflateEnd(&zs);
  return out;
}

/// Reads an IDX file; gzip input is recognized by its 0x1f 0x8b prefix.
inline IdxTensor read_idx_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) bytes = gunzip(bytes);
  return parse_idx(bytes);
}

inline constexpr int kDigitSide = 28;
inline constexpr std::size_t kDigitPixels = kDigitSide * kDigitSide;
inline constexpr int kCompositeSide = 2 * kDigitSide;

/// Labelled 28x28 digit images.
struct DigitSet {
  std::vector<std::uint8_t> pixels;  // count * 784
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }

  std::span<const std::uint8_t> image(std::size_t i) const {
    return {pixels.data() + i * kDigitPixels, kDigitPixels};
  }

  static DigitSet from_idx(const IdxTensor& images, const IdxTensor& labels) {
    require(images.dims.size() == 3 && images.dims[1] == kDigitSide && images.dims[2] == kDigitSide, ErrorCode::bad_shape,
            "image tensor must be N x 28 x 28");
    require(labels.dims.size() == 1 && labels.dims[0] == images.dims[0], ErrorCode::bad_shape,
            "label tensor must be N with N matching the images");
    DigitSet s;
    s.pixels = images.data;
    s.labels = labels.data;
    for (auto l : s.labels) require(l <= 9, ErrorCode::domain_mismatch, "digit label above 9");
    return s;
  }

  static DigitSet load(const std::filesystem::path& images, const std::filesystem::path& labels) {
    return from_idx(read_idx_file(images), read_idx_file(labels));
  }

  /// Items [begin, end).
  DigitSet slice(std::size_t begin, std::size_t end) const {
    end = std::min(end, size());
    DigitSet s;
    if (begin >= end) return s;
    s.pixels.assign(pixels.begin() + static_cast<std::ptrdiff_t>(begin * kDigitPixels),
                    pixels.begin() + static_cast<std::ptrdiff_t>(end * kDigitPixels));
    s.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin), labels.begin() + static_cast<std::ptrdiff_t>(end));
    return s;
  }

  /// At most `per_class` items of each digit, keeping file order.
  DigitSet take_per_class(std::size_t per_class) const {
    DigitSet s;
    std::array<std::size_t, 10> taken{};
    for (std::size_t i = 0; i < size(); ++i) {
      if (taken[labels[i]]++ >= per_class) continue;
      const auto img = image(i);
      s.pixels.insert(s.pixels.end(), img.begin(), img.end());
      s.labels.push_back(labels[i]);
    }
    return s;
  }

  /// Indices of each class.
  std::array<std::vector<std::size_t>, 10> pools() const {
    std::array<std::vector<std::size_t>, 10> out;
    for (std::size_t i = 0; i < size(); ++i) out[labels[i]].push_back(i);
    return out;
  }
};

/// Digits at the top-left, top-right and bottom-left quadrants; id = 100a + 10b + c.
struct Combination {
  std::array<int, 3> digits{};

  int id() const { return digits[0] * 100 + digits[1] * 10 + digits[2]; }

  std::string label() const {
    return {static_cast<char>('0' + digits[0]), static_cast<char>('0' + digits[1]), static_cast<char>('0' + digits[2])};
  }

  static Combination from_id(std::int64_t id) {
    require(id >= 0 && id <= 999, ErrorCode::domain_mismatch, "combination id must lie in 0..999");
    const int v = static_cast<int>(id);
    return {{v / 100, (v / 10) % 10, v % 10}};
  }

  static Combination parse(const std::string& s) {
    require(s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }),
            ErrorCode::domain_mismatch, "combination '" + s + "' must be three digits");
    return {{s[0] - '0', s[1] - '0', s[2] - '0'}};
  }

  bool operator==(const Combination&) const = default;
};

/// The 1000-combination space of three 0-9 digits with canonical ids 000..999.
inline CombinationSpace three_digit_space() { return CombinationSpace::digits(3, 10); }

struct ThreeMnistSpec {
  std::vector<Combination> support;
  std::size_t image_count = 0;
  std::uint64_t base_seed = 0;
};

/// Quadrant origin (x, y) of position 0 (TL), 1 (TR), 2 (BL).
constexpr std::pair<int, int> quadrant_origin(int position) {
  return position == 0 ? std::pair{0, 0} : position == 1 ? std::pair{kDigitSide, 0} : std::pair{0, kDigitSide};
}

inline Image compose_digits(const DigitSet& digits, const std::array<std::size_t, 3>& exemplars) {
  Image img(kCompositeSide, kCompositeSide, 1, 0);
  for (int pos = 0; pos < 3; ++pos) {
    const auto [ox, oy] = quadrant_origin(pos);
    const auto src = digits.image(exemplars[static_cast<std::size_t>(pos)]);
    for (int y = 0; y < kDigitSide; ++y)
      for (int x = 0; x < kDigitSide; ++x)
        img.pixels[img.offset(ox + x, oy + y)] = src[static_cast<std::size_t>(y * kDigitSide + x)];
  }
  return img;
}

struct ComposedItem {
  Combination combination;
  std::array<std::size_t, 3> exemplars{};
};

inline ComposedItem draw_three_mnist(const ThreeMnistSpec& spec, const std::array<std::vector<std::size_t>, 10>& pools,
                                     std::size_t index) {
  Rng rng(item_seed(spec.base_seed, index));
  ComposedItem item;
  item.combination = spec.support[rng.below(spec.support.size())];
  for (int pos = 0; pos < 3; ++pos) {
    const auto& pool = pools[static_cast<std::size_t>(item.combination.digits[static_cast<std::size_t>(pos)])];
    item.exemplars[static_cast<std::size_t>(pos)] = pool[rng.below(pool.size())];
  }
  return item;
}

/// Composes spec.image_count 56x56 gray images, each showing a combination
/// drawn uniformly from the support with a random exemplar per digit; the
/// bottom-right quadrant stays black. Writes images and manifest under `out`
/// when given.
inline DatasetManifest compose_three_mnist(const ThreeMnistSpec& spec, const DigitSet& digits,
                                           const std::optional<std::filesystem::path>& out = std::nullopt) {
  require(!spec.support.empty(), ErrorCode::empty_support, "three-digit support is empty");
  const auto pools = digits.pools();
  for (const auto& c : spec.support)
    for (int d : c.digits)
      require(!pools[static_cast<std::size_t>(d)].empty(), ErrorCode::empty_class_pool,
              "no exemplars for digit " + std::to_string(d));
  if (out) std::filesystem::create_directories(*out / "images");
  DatasetManifest m;
  m.records.resize(spec.image_count);
  parallel_for(spec.image_count, [&](std::size_t i) {
    const auto item = draw_three_mnist(spec, pools, i);
    auto& rec = m.records[i];
    rec.file = "images/" + image_name(i);
    rec.seed = item_seed(spec.base_seed, i);
    rec.features.values["combination"] = item.combination.label();
    if (out) write_png(*out / rec.file, compose_digits(digits, item.exemplars));
  });
  if (out) {
    write_manifest(*out / "manifest.jsonl", m);
    json echo;
    echo["generator"] = "mnist3";
    echo["image_count"] = spec.image_count;
    echo["base_seed"] = spec.base_seed;
    echo["support"] = json::array();
    for (const auto& c : spec.support) echo["support"].push_back(c.label());
    write_text_file(*out / "spec.json", echo.dump(2) + "\n");
  }
  return m;
}

/// Label of the reference with the smallest mean squared pixel distance;
/// ties go to the lowest reference index.
inline int classify_digit(std::span<const std::uint8_t> image, const DigitSet& references) {
  require(references.size() > 0, ErrorCode::empty_references, "no reference digits");
  require(image.size() == kDigitPixels, ErrorCode::bad_shape, "digit image must be 28x28");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::size_t best_index = 0;
  for (std::size_t r = 0; r < references.size(); ++r) {
    const auto ref = references.image(r);
    std::int64_t dist = 0;
    for (std::size_t p = 0; p < kDigitPixels; ++p) {
      const int d = int{image[p]} - int{ref[p]};
      dist += d * d;
    }
    if (dist < best) {
      best = dist;
      best_index = r;
    }
  }
  return references.labels[best_index];
}

/// Splits a 56x56 composite into its TL, TR and BL quadrants and classifies each.
inline Combination classify_combination(const Image& image, const DigitSet& references) {
  require(image.width == kCompositeSide && image.height == kCompositeSide, ErrorCode::bad_shape,
          "composite image must be 56x56, got " + std::to_string(image.width) + "x" + std::to_string(image.height));
  Combination c;
  std::vector<std::uint8_t> quad(kDigitPixels);
  for (int pos = 0; pos < 3; ++pos) {
    const auto [ox, oy] = quadrant_origin(pos);
    for (int y = 0; y < kDigitSide; ++y)
      for (int x = 0; x < kDigitSide; ++x) quad[static_cast<std::size_t>(y * kDigitSide + x)] = image.at(ox + x, oy + y).r;
    c.digits[static_cast<std::size_t>(pos)] = classify_digit(quad, references);
  }
  return c;
}

/// External classifier output: file -> combination label, one JSON object
/// per line: {"file": ..., "combination": "717"}.
inline std::map<std::string, std::string> read_labels_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      out[j.at("file").get<std::string>()] = j.at("combination").get<std::string>();
    } catch (const json::exception& e) {
      fail(ErrorCode::io, path.string() + ": " + e.what());
    }
  }
  return out;
}

/// Overrides the combination feature of records named in `labels`. Files
/// match exactly, or by file name when the label file omits the directory.
inline std::size_t apply_labels(DatasetManifest& manifest, const std::map<std::string, std::string>& labels,
                                const std::string& feature = "combination") {
  std::map<std::string, std::string> by_name;
  for (const auto& [file, label] : labels) by_name[std::filesystem::path(file).filename().string()] = label;
  std::size_t applied = 0;
  for (auto& r : manifest.records) {
    auto it = labels.find(r.file);
    if (it == labels.end()) {
      it = by_name.find(std::filesystem::path(r.file).filename().string());
      if (it == by_name.end()) continue;
    }
    r.features.values[feature] = it->second;
    ++applied;
  }
  return applied;
}

}  // namespace genprobe
