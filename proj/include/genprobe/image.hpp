#pragma once

#include <png.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "genprobe/error.hpp"

namespace genprobe {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// 8-bit image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  static Image rgb(int w, int h, Rgb fill) {
    Image img(w, h, 3);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img.set(x, y, fill);
    return img;
  }

  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * static_cast<std::size_t>(channels);
  }

  /// RGB view of a pixel; gray pixels are replicated.
  Rgb at(int x, int y) const {
    const auto* p = &pixels[offset(x, y)];
    return channels == 1 ? Rgb{p[0], p[0], p[0]} : Rgb{p[0], p[1], p[2]};
  }

  std::uint8_t gray(int x, int y) const { return pixels[offset(x, y)]; }

  void set(int x, int y, Rgb c) {
    auto* p = &pixels[offset(x, y)];
    if (channels == 1) {
      p[0] = c.r;
    } else {
      p[0] = c.r;
      p[1] = c.g;
      p[2] = c.b;
    }
  }

  bool operator==(const Image&) const = default;
};

/// Writes an 8-bit gray or RGB PNG. No text chunks or timestamps are written,
/// so identical pixels give identical files.
inline void write_png(const std::filesystem::path& path, const Image& img) {
  require(img.channels == 1 || img.channels == 3, ErrorCode::io, "PNG writer supports 1 or 3 channels");
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width);
  desc.height = static_cast<png_uint_32>(img.height);
  desc.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int ok = png_image_write_to_file(&desc, path.string().c_str(), 0, img.pixels.data(), 0, nullptr);
  const std::string msg = desc.message;
  png_image_free(&desc);
  require(ok != 0, ErrorCode::io, "cannot write " + path.string() + ": " + msg);
}

/// Reads any PNG as 8-bit gray (gray inputs) or RGB (everything else).
/// Alpha is composited over white.
inline Image read_png(const std::filesystem::path& path) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&desc, path.string().c_str())) {
    const std::string msg = desc.message;
    png_image_free(&desc);
    fail(ErrorCode::io, "cannot read " + path.string() + ": " + msg);
  }
  const bool gray = (desc.format & PNG_FORMAT_FLAG_COLOR) == 0;
  desc.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  Image img(static_cast<int>(desc.width), static_cast<int>(desc.height), gray ? 1 : 3);
  const png_color white{255, 255, 255};
  const int ok = png_image_finish_read(&desc, &white, img.pixels.data(), 0, nullptr);
  const std::string msg = desc.message;
  png_image_free(&desc);
  require(ok != 0, ErrorCode::io, "cannot decode " + path.string() + ": " + msg);
  return img;
}

}  // namespace genprobe
